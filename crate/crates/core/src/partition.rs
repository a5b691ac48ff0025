//! Partitions of `(F2)^n`, their images under permutations, and linear
//! partition propagation.

use crate::error::{Error, Result};
use crate::f2lin::{
    check_permutation, check_table, check_width, enumerate_subspaces, subspace_shards, Subspace,
    Word,
};
use serde::{Deserialize, Serialize};

/// Largest width for an unfiltered [`search_propagating_pairs`] scan.
pub const MAX_PAIR_SEARCH_WIDTH: u32 = 8;

/// A partition stored as a block label per point. Labels are normalized to
/// first-appearance order, so equal partitions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenericPartition {
    width: u32,
    labels: Vec<u32>,
    blocks: u32,
}

impl GenericPartition {
    /// Builds a partition from explicit blocks, which must be non-empty,
    /// disjoint, and cover every point.
    pub fn from_blocks(width: u32, blocks: &[Vec<Word>]) -> Result<Self> {
        check_width(width)?;
        if width > 16 {
            return Err(Error::WidthOutOfRange(width));
        }
        let size = 1usize << width;
        let mut labels = vec![u32::MAX; size];
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::MalformedPartition(format!("block {i} is empty")));
            }
            for &x in block {
                let slot = labels.get_mut(x as usize).ok_or_else(|| {
                    Error::MalformedPartition(format!("point {x} outside {width}-bit space"))
                })?;
                if *slot != u32::MAX {
                    return Err(Error::MalformedPartition(format!(
                        "point {x} lies in blocks {} and {i}",
                        *slot
                    )));
                }
                *slot = i as u32;
            }
        }
        if let Some(x) = labels.iter().position(|&l| l == u32::MAX) {
            return Err(Error::MalformedPartition(format!(
                "point {x} is not covered"
            )));
        }
        Ok(Self::from_labels_unchecked(width, labels))
    }

    /// Builds a partition from any labelling of the points.
    pub fn from_labels(width: u32, labels: Vec<u32>) -> Result<Self> {
        check_width(width)?;
        if width > 16 {
            return Err(Error::WidthOutOfRange(width));
        }
        if labels.len() != 1 << width {
            return Err(Error::TableSize {
                expected: 1 << width,
                found: labels.len(),
            });
        }
        Ok(Self::from_labels_unchecked(width, labels))
    }

    fn from_labels_unchecked(width: u32, labels: Vec<u32>) -> Self {
        let mut map = std::collections::HashMap::new();
        let labels: Vec<u32> = labels
            .into_iter()
            .map(|l| {
                let next = map.len() as u32;
                *map.entry(l).or_insert(next)
            })
            .collect();
        GenericPartition {
            width,
            labels,
            blocks: map.len() as u32,
        }
    }

    /// `L(U)`: the cosets of `U`.
    pub fn linear(u: &Subspace) -> Self {
        let labels = (0..1u32 << u.width()).map(|x| u.reduce(x)).collect();
        Self::from_labels_unchecked(u.width(), labels)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn block_count(&self) -> usize {
        self.blocks as usize
    }

    #[inline]
    pub fn block_of(&self, x: Word) -> u32 {
        self.labels[x as usize]
    }

    /// Blocks in label order, each sorted ascending.
    pub fn blocks(&self) -> Vec<Vec<Word>> {
        let mut out = vec![Vec::new(); self.blocks as usize];
        for (x, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(x as Word);
        }
        out
    }

    /// `{f(A) : A a block}` for a permutation table `f`.
    pub fn image(&self, f: &[Word]) -> Result<Self> {
        check_permutation(f, self.width)?;
        let mut labels = vec![0; self.labels.len()];
        for (x, &l) in self.labels.iter().enumerate() {
            labels[f[x] as usize] = l;
        }
        Ok(Self::from_labels_unchecked(self.width, labels))
    }
}

/// The subspace `U` with `p = L(U)`, if `p` is linear.
pub fn as_linear(p: &GenericPartition) -> Option<Subspace> {
    let zero_block = p.block_of(0);
    let u = Subspace::span(
        p.width,
        (0..p.labels.len() as Word).filter(|&x| p.block_of(x) == zero_block),
    );
    if u.size() != p.labels.iter().filter(|&&l| l == zero_block).count() as u64 {
        return None;
    }
    (GenericPartition::linear(&u) == *p).then_some(u)
}

/// Whether the permutation `f` maps the blocks of `a` onto the blocks of `b`.
pub fn maps_partition(f: &[Word], a: &GenericPartition, b: &GenericPartition) -> Result<bool> {
    if a.width != b.width {
        return Err(Error::WidthMismatch {
            expected: a.width,
            found: b.width,
        });
    }
    Ok(a.image(f)? == *b)
}

/// Scans every translation `x ↦ x + v` for mapping `a` onto `b` and checks
/// the answer against "`a = b` and `a` is linear".
pub fn translation_criterion(a: &GenericPartition, b: &GenericPartition) -> Result<bool> {
    if a.width != b.width {
        return Err(Error::WidthMismatch {
            expected: a.width,
            found: b.width,
        });
    }
    let size = 1usize << a.width;
    let scan = crate::par::all_indices(size, |v| {
        let t: Vec<Word> = (0..size as Word).map(|x| x ^ v as Word).collect();
        a.image(&t).map(|img| img == *b).unwrap_or(false)
    });
    let predicate = a == b && as_linear(a).is_some();
    if scan != predicate {
        return Err(Error::CriterionMismatch);
    }
    Ok(scan)
}

/// `W` with `L(U)f = L(W)`, if it exists. `f` must be a permutation table of
/// width `u.width()`.
///
/// The candidate `W = {f(u) + f(0) : u ∈ U}` is built incrementally and
/// abandoned as soon as it outgrows `U`; then every point `x` is checked
/// for `f(x) + f(rep(x)) ∈ W`.
pub fn propagate_linear(f: &[Word], u: &Subspace) -> Option<Subspace> {
    debug_assert_eq!(f.len(), 1usize << u.width());
    propagate_linear_with(|x| f[x as usize], u)
}

/// [`propagate_linear`] for a permutation given as a function.
pub fn propagate_linear_with<F: Fn(Word) -> Word>(f: F, u: &Subspace) -> Option<Subspace> {
    let w = candidate_image(&f, u)?;
    let ok = (0..1u64 << u.width()).all(|x| {
        let x = x as Word;
        w.contains(f(x) ^ f(u.reduce(x)))
    });
    ok.then_some(w)
}

fn candidate_image<F: Fn(Word) -> Word>(f: &F, u: &Subspace) -> Option<Subspace> {
    let f0 = f(0);
    let mut w = Subspace::zero(u.width());
    for x in u.elements() {
        w.insert(f(x) ^ f0);
        if w.dim() > u.dim() {
            return None;
        }
    }
    (w.dim() == u.dim()).then_some(w)
}

/// Exact test of `(U + v)f = W + f(v)` for every `v`, valid for any map
/// `f`, injective or not.
pub fn maps_cosets_exactly(f: &[Word], u: &Subspace, w: &Subspace) -> bool {
    if u.dim() != w.dim() || f.len() != 1usize << u.width() {
        return false;
    }
    let mut seen = vec![u32::MAX; f.len()];
    for (tag, v) in u.coset_reps().enumerate() {
        let base = f[v as usize];
        for x in u.elements() {
            let y = f[(v ^ x) as usize];
            if !w.contains(y ^ base) {
                return false;
            }
            // distinct images within the coset
            let slot = &mut seen[(y ^ base) as usize];
            if *slot == tag as u32 {
                return false;
            }
            *slot = tag as u32;
        }
    }
    true
}

/// `propagate_linear` on an arbitrary map table: the same candidate, then
/// the exact coset test.
pub fn propagate_linear_map(f: &[Word], u: &Subspace) -> Option<Subspace> {
    check_table(f, u.width()).ok()?;
    let w = candidate_image(&|x: Word| f[x as usize], u)?;
    maps_cosets_exactly(f, u, &w).then_some(w)
}

/// All proper non-trivial `U` with `L(U)f` linear, paired with the image
/// subspace, sorted by dimension and then basis.
pub fn search_propagating_pairs(
    f: &[Word],
    width: u32,
    dims: Option<&[u32]>,
) -> Result<Vec<(Subspace, Subspace)>> {
    check_permutation(f, width)?;
    if dims.is_none() && width > MAX_PAIR_SEARCH_WIDTH {
        return Err(Error::EnumerationTooLarge(width));
    }
    let proper: Vec<u32> = match dims {
        Some(d) => d.iter().copied().filter(|&d| d > 0 && d < width).collect(),
        None => (1..width).collect(),
    };
    if let Some(d) = dims {
        if let Some(&bad) = d.iter().find(|&&d| d > width) {
            return Err(Error::Parameter(format!(
                "dimension {bad} exceeds width {width}"
            )));
        }
    }
    let shards = subspace_shards(width, Some(&proper))?;
    let mut out = crate::par::flat_map(&shards, |p| {
        p.subspaces()
            .filter_map(|u| propagate_linear(f, &u).map(|w| (u, w)))
            .collect()
    });
    out.sort_by(|a, b| (a.0.dim(), a.0.basis()).cmp(&(b.0.dim(), b.0.basis())));
    Ok(out)
}

/// Brute-force reference for small widths: tests every pair of subspaces.
#[doc(hidden)]
pub fn search_propagating_pairs_oracle(f: &[Word], width: u32) -> Vec<(Subspace, Subspace)> {
    let all: Vec<Subspace> = enumerate_subspaces(width, None)
        .expect("small width")
        .collect();
    let mut out = Vec::new();
    for u in all.iter().filter(|u| u.is_proper_nontrivial()) {
        let a = GenericPartition::linear(u).image(f).expect("permutation");
        for w in &all {
            if GenericPartition::linear(w) == a {
                out.push((u.clone(), w.clone()));
            }
        }
    }
    out.sort_by(|a, b| (a.0.dim(), a.0.basis()).cmp(&(b.0.dim(), b.0.basis())));
    out
}

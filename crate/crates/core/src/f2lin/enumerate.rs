//! Duplicate-free subspace enumeration by canonical echelon matrices.
//!
//! A canonical basis is fixed by its set of pivot positions together with
//! the free bits of each basis vector: the non-pivot positions strictly
//! below its own pivot. Walking every pivot pattern and every assignment of
//! free bits yields each subspace exactly once.

use super::subspace::deposit;
use super::{check_width, Subspace, Word};
use crate::error::{Error, Result};

/// Largest width for which unfiltered enumeration is allowed.
pub const MAX_FULL_ENUMERATION_WIDTH: u32 = 12;

/// One pivot pattern: a shard of the enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotPattern {
    width: u32,
    /// Pivot positions, descending.
    pivots: Vec<u32>,
    /// Free positions for each basis vector, aligned with `pivots`.
    free: Vec<Vec<u32>>,
    total_free: u32,
}

impl PivotPattern {
    fn new(width: u32, pivot_mask: Word) -> Self {
        let pivots: Vec<u32> = (0..width)
            .rev()
            .filter(|&i| (pivot_mask >> i) & 1 == 1)
            .collect();
        let free: Vec<Vec<u32>> = pivots
            .iter()
            .map(|&p| (0..p).filter(|&i| (pivot_mask >> i) & 1 == 0).collect())
            .collect();
        let total_free = free.iter().map(|f| f.len() as u32).sum();
        PivotPattern {
            width,
            pivots,
            free,
            total_free,
        }
    }

    pub fn dim(&self) -> u32 {
        self.pivots.len() as u32
    }

    /// Number of subspaces with this pivot pattern.
    pub fn count(&self) -> u64 {
        1u64 << self.total_free
    }

    /// The `index`-th subspace of this pattern, `index < count()`.
    pub fn nth(&self, index: u64) -> Subspace {
        let mut c = index;
        let basis = self
            .pivots
            .iter()
            .zip(&self.free)
            .map(|(&p, f)| {
                let part = c & ((1u64 << f.len()) - 1);
                c >>= f.len();
                (1 << p) | deposit(part, f)
            })
            .collect();
        Subspace::from_canonical(self.width, basis)
    }

    pub fn subspaces(&self) -> impl Iterator<Item = Subspace> + '_ {
        (0..self.count()).map(move |i| self.nth(i))
    }
}

/// All pivot patterns for the requested dimensions, in increasing dimension
/// and then increasing pivot-mask order.
pub fn subspace_shards(width: u32, dims: Option<&[u32]>) -> Result<Vec<PivotPattern>> {
    check_width(width)?;
    let dims: Vec<u32> = match dims {
        Some(d) => {
            if let Some(&bad) = d.iter().find(|&&d| d > width) {
                return Err(Error::Parameter(format!(
                    "dimension {bad} exceeds width {width}"
                )));
            }
            let mut d = d.to_vec();
            d.sort_unstable();
            d.dedup();
            d
        }
        None => {
            if width > MAX_FULL_ENUMERATION_WIDTH {
                return Err(Error::EnumerationTooLarge(width));
            }
            (0..=width).collect()
        }
    };
    let mut out = Vec::new();
    for d in dims {
        for m in masks_with_popcount(width, d) {
            out.push(PivotPattern::new(width, m));
        }
    }
    Ok(out)
}

/// Stream over every subspace of `(F2)^width`, optionally restricted to the
/// given dimensions.
pub fn enumerate_subspaces(width: u32, dims: Option<&[u32]>) -> Result<SubspaceIter> {
    Ok(SubspaceIter {
        shards: subspace_shards(width, dims)?,
        shard: 0,
        index: 0,
    })
}

pub struct SubspaceIter {
    shards: Vec<PivotPattern>,
    shard: usize,
    index: u64,
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        while let Some(p) = self.shards.get(self.shard) {
            if self.index < p.count() {
                let s = p.nth(self.index);
                self.index += 1;
                return Some(s);
            }
            self.shard += 1;
            self.index = 0;
        }
        None
    }
}

fn masks_with_popcount(width: u32, k: u32) -> Vec<Word> {
    if k == 0 {
        return vec![0];
    }
    // Gosper's hack over `width`-bit masks.
    let mut out = Vec::new();
    let limit: u64 = 1u64 << width;
    let mut m: u64 = (1u64 << k) - 1;
    while m < limit {
        out.push(m as Word);
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// Distinct spans of all subsets of the space.
    fn all_spans(n: u32) -> BTreeSet<Subspace> {
        let size = 1u64 << n;
        let mut out = BTreeSet::new();
        // subsets of size ≤ n suffice to reach every span
        fn rec(n: u32, start: u64, size: u64, cur: &mut Vec<Word>, out: &mut BTreeSet<Subspace>) {
            out.insert(Subspace::span(n, cur.iter().copied()));
            if cur.len() as u32 == n {
                return;
            }
            for v in start..size {
                cur.push(v as Word);
                rec(n, v + 1, size, cur, out);
                cur.pop();
            }
        }
        rec(n, 1, size, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn counts_small() {
        let count = |n| enumerate_subspaces(n, None).unwrap().count();
        assert_eq!(count(1), 2);
        assert_eq!(count(2), 5);
        assert_eq!(count(3), 16);
        assert_eq!(count(4), 67);
    }

    #[test]
    fn enumeration_matches_span_oracle() {
        for n in 1..=4 {
            let listed: Vec<Subspace> = enumerate_subspaces(n, None).unwrap().collect();
            let set: BTreeSet<Subspace> = listed.iter().cloned().collect();
            assert_eq!(set.len(), listed.len(), "duplicates at n={n}");
            assert_eq!(set, all_spans(n));
        }
    }

    #[test]
    fn dimension_filter() {
        let v: Vec<Subspace> = enumerate_subspaces(4, Some(&[2])).unwrap().collect();
        assert_eq!(v.len(), 35);
        assert!(v.iter().all(|s| s.dim() == 2));
        assert!(enumerate_subspaces(13, None).is_err());
        assert_eq!(enumerate_subspaces(13, Some(&[1])).unwrap().count(), 8191);
        assert!(enumerate_subspaces(4, Some(&[5])).is_err());
    }

    #[test]
    fn popcount_masks() {
        assert_eq!(masks_with_popcount(4, 2).len(), 6);
        assert_eq!(masks_with_popcount(4, 4), vec![15]);
        assert_eq!(masks_with_popcount(32, 1).len(), 32);
    }
}

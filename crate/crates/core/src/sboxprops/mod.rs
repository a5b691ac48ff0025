//! S-box security metrics: difference distribution, differential
//! uniformity, weak uniformity, strong anti-invariance, and the parallel
//! S-box layer.

pub mod catalog;

use crate::error::{Error, Result};
use crate::f2lin::{check_permutation, enumerate_subspaces, BitVec, BrickLayout, Subspace, Word};
use serde::{Deserialize, Serialize};

/// A permutation of `(F2)^s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SBox {
    width: u32,
    table: Vec<Word>,
}

impl SBox {
    pub fn new(width: u32, table: Vec<Word>) -> Result<Self> {
        if width == 0 || width > 16 {
            return Err(Error::WidthOutOfRange(width));
        }
        check_permutation(&table, width)?;
        Ok(SBox { width, table })
    }

    pub fn identity(width: u32) -> Self {
        SBox {
            width,
            table: (0..1 << width).collect(),
        }
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn table(&self) -> &[Word] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: Word) -> Word {
        self.table[x as usize]
    }

    pub fn inverse(&self) -> SBox {
        SBox {
            width: self.width,
            table: crate::f2lin::invert_table(&self.table),
        }
    }

    /// `x ↦ f(x) + f(0)`, which fixes zero.
    pub fn normalized(&self) -> SBox {
        let c = self.table[0];
        SBox {
            width: self.width,
            table: self.table.iter().map(|&y| y ^ c).collect(),
        }
    }
}

/// Brick-wise application of one S-box per brick.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParallelSBox {
    layout: BrickLayout,
    boxes: Vec<SBox>,
}

impl ParallelSBox {
    pub fn new(layout: BrickLayout, boxes: Vec<SBox>) -> Result<Self> {
        if boxes.len() != layout.bricks() as usize {
            return Err(Error::Parameter(format!(
                "{} S-boxes supplied for {} bricks",
                boxes.len(),
                layout.bricks()
            )));
        }
        if let Some(f) = boxes.iter().find(|f| f.width() != layout.brick_width()) {
            return Err(Error::WidthMismatch {
                expected: layout.brick_width(),
                found: f.width(),
            });
        }
        Ok(ParallelSBox { layout, boxes })
    }

    pub fn identity(layout: BrickLayout) -> Self {
        let boxes = (0..layout.bricks())
            .map(|_| SBox::identity(layout.brick_width()))
            .collect();
        ParallelSBox { layout, boxes }
    }

    pub fn layout(&self) -> BrickLayout {
        self.layout
    }

    pub fn boxes(&self) -> &[SBox] {
        &self.boxes
    }

    #[inline]
    pub fn apply(&self, x: Word) -> Word {
        let s = self.layout.brick_width();
        self.boxes.iter().enumerate().fold(0, |acc, (j, f)| {
            acc | (f.apply(self.layout.brick_value(x, j as u32)) << (j as u32 * s))
        })
    }

    pub fn table(&self) -> Vec<Word> {
        (0..1 << self.layout.width())
            .map(|x| self.apply(x))
            .collect()
    }

    /// Same layer with every box normalized to fix zero.
    pub fn normalized(&self) -> ParallelSBox {
        ParallelSBox {
            layout: self.layout,
            boxes: self.boxes.iter().map(SBox::normalized).collect(),
        }
    }

    pub fn fixes_zero(&self) -> bool {
        self.boxes.iter().all(|f| f.apply(0) == 0)
    }
}

/// Checked brick-wise application on a `BitVec`.
pub fn parallel_apply(gamma: &ParallelSBox, x: BitVec) -> Result<BitVec> {
    let n = gamma.layout.width();
    if x.width() != n {
        return Err(Error::WidthMismatch {
            expected: n,
            found: x.width(),
        });
    }
    BitVec::new(gamma.apply(x.bits()), n)
}

/// Difference distribution table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ddt {
    width: u32,
    counts: Vec<u32>,
}

impl Ddt {
    #[inline]
    pub fn get(&self, a: Word, b: Word) -> u32 {
        self.counts[((a as usize) << self.width) | b as usize]
    }

    pub fn row(&self, a: Word) -> &[u32] {
        let size = 1usize << self.width;
        &self.counts[a as usize * size..(a as usize + 1) * size]
    }

    pub fn width(&self) -> u32 {
        self.width
    }
}

/// `counts[a][b] = |{x : f(x) + f(x+a) = b}|`.
pub fn ddt(f: &SBox) -> Ddt {
    let s = f.width;
    let size = 1usize << s;
    let rows = crate::par::map(&(0..size).collect::<Vec<_>>(), |&a| {
        let mut row = vec![0u32; size];
        for x in 0..size {
            row[(f.table[x] ^ f.table[x ^ a]) as usize] += 1;
        }
        row
    });
    Ddt {
        width: s,
        counts: rows.concat(),
    }
}

/// Maximum DDT entry over non-zero input differences.
pub fn differential_uniformity(f: &SBox) -> u32 {
    let d = ddt(f);
    (1..1 << f.width)
        .flat_map(|a| d.row(a).iter().copied())
        .max()
        .unwrap_or(0)
}

/// `δ = 2`.
pub fn is_apn(f: &SBox) -> bool {
    differential_uniformity(f) == 2
}

/// `|{f(x) + f(x+a) : x}|` for every `a` (index 0 included).
pub fn derivative_image_sizes(f: &SBox) -> Vec<u32> {
    let d = ddt(f);
    (0..1 << f.width)
        .map(|a| d.row(a).iter().filter(|&&c| c > 0).count() as u32)
        .collect()
}

/// Every non-zero derivative hits more than `2^{s-1}/δ` values.
pub fn is_weakly_uniform(f: &SBox, delta: u32) -> bool {
    assert!(delta >= 1, "delta must be positive");
    let half = 1u64 << (f.width - 1);
    derivative_image_sizes(f)
        .iter()
        .skip(1)
        .all(|&size| size as u64 * delta as u64 > half)
}

/// Strong anti-invariance of an S-box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntiInvariance {
    /// Largest `δ ∈ [1, s-1]` with the box strongly `δ`-anti-invariant,
    /// or 0 if none.
    pub order: u32,
    /// Largest dimension of a proper non-trivial subspace mapped onto a
    /// subspace, if any.
    pub max_invariant_dim: Option<u32>,
    /// The box did not fix zero and was analysed as `x ↦ f(x) + f(0)`.
    pub normalized: bool,
}

/// Scans all proper non-trivial subspaces of `(F2)^s` for ones mapped onto
/// subspaces.
pub fn anti_invariance_order(f: &SBox) -> AntiInvariance {
    let s = f.width;
    let normalized = f.apply(0) != 0;
    let g = f.normalized();
    let dims: Vec<u32> = (1..s).collect();
    let mut m: Option<u32> = None;
    if !dims.is_empty() {
        for u in enumerate_subspaces(s, Some(&dims)).expect("brick widths are small") {
            let image = Subspace::span(s, u.elements().map(|x| g.apply(x)));
            if image.dim() == u.dim() {
                m = Some(m.map_or(u.dim(), |v| v.max(u.dim())));
            }
        }
    }
    let order = match m {
        Some(m) => (s - 1).saturating_sub(m),
        None => s.saturating_sub(1),
    };
    AntiInvariance {
        order,
        max_invariant_dim: m,
        normalized,
    }
}

/// Per-box metrics used by hypothesis checks and reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SBoxReport {
    pub width: u32,
    pub delta: u32,
    pub apn: bool,
    /// `weak_uniform[k]` is the weak `2^k`-uniformity flag for `k = 0..s`.
    pub weak_uniform: Vec<bool>,
    pub anti_invariance: AntiInvariance,
}

pub fn analyze_sbox(f: &SBox) -> SBoxReport {
    let delta = differential_uniformity(f);
    SBoxReport {
        width: f.width,
        delta,
        apn: delta == 2,
        weak_uniform: (0..f.width).map(|k| is_weakly_uniform(f, 1 << k)).collect(),
        anti_invariance: anti_invariance_order(f),
    }
}

#[cfg(test)]
mod tests {
    use super::catalog::{cube_sbox, random_linear_equivalent, random_sbox};
    use super::*;
    use crate::f2lin::LinearMap;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use std::collections::BTreeSet;

    fn linear_sbox(s: u32, seed: u64) -> SBox {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        SBox::new(s, LinearMap::random_invertible(s, &mut rng).table()).unwrap()
    }

    /// Direct count, no table reuse.
    fn brute_delta(f: &SBox) -> u32 {
        let n = 1u32 << f.width();
        let mut best = 0;
        for a in 1..n {
            for b in 0..n {
                let c = (0..n).filter(|&x| f.apply(x) ^ f.apply(x ^ a) == b).count() as u32;
                best = best.max(c);
            }
        }
        best
    }

    #[test]
    fn identity_ddt() {
        let d = ddt(&SBox::identity(3));
        for a in 0..8 {
            for b in 0..8 {
                assert_eq!(d.get(a, b), if a == b { 8 } else { 0 });
            }
        }
    }

    #[test]
    fn row_zero_concentrated() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for s in 2..=5 {
            let f = random_sbox(s, &mut rng);
            let d = ddt(&f);
            assert_eq!(d.get(0, 0), 1 << s);
            assert!(d.row(0)[1..].iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn cube_is_apn() {
        let f = cube_sbox(3).unwrap();
        assert_eq!(brute_delta(&f), 2);
        assert_eq!(differential_uniformity(&f), 2);
        assert!(is_apn(&f));
    }

    #[test]
    fn linear_uniformity() {
        assert_eq!(differential_uniformity(&linear_sbox(3, 4)), 8);
        assert_eq!(differential_uniformity(&SBox::identity(4)), 16);
    }

    #[test]
    fn weak_uniformity_examples() {
        let f = cube_sbox(3).unwrap();
        assert!(derivative_image_sizes(&f)[1..].iter().all(|&c| c == 4));
        assert!(is_weakly_uniform(&f, 2));
        assert!(!is_weakly_uniform(&SBox::identity(3), 2));
        for s in [3, 5] {
            let g = cube_sbox(s).unwrap();
            assert!(derivative_image_sizes(&g)[1..]
                .iter()
                .all(|&c| c == 1 << (s - 1)));
        }
    }

    /// Subspace-image scan written directly over point sets.
    fn brute_max_invariant_dim(f: &SBox) -> Option<u32> {
        let s = f.width();
        let g = f.normalized();
        let n = 1u32 << s;
        let mut best = None;
        // every subset closed under xor containing 0 is a subspace
        for set_mask in 0u64..(1u64 << n) {
            if set_mask & 1 == 0 {
                continue;
            }
            let pts: Vec<u32> = (0..n).filter(|&x| (set_mask >> x) & 1 == 1).collect();
            let closed = pts
                .iter()
                .all(|&a| pts.iter().all(|&b| (set_mask >> (a ^ b)) & 1 == 1));
            let size = pts.len() as u32;
            if !closed || size == 1 || size == n {
                continue;
            }
            let img: BTreeSet<u32> = pts.iter().map(|&x| g.apply(x)).collect();
            if img
                .iter()
                .all(|&a| img.iter().all(|&b| img.contains(&(a ^ b))))
            {
                let d = size.trailing_zeros();
                best = Some(best.map_or(d, |v: u32| v.max(d)));
            }
        }
        best
    }

    #[test]
    fn anti_invariance_examples() {
        let id = anti_invariance_order(&SBox::identity(3));
        assert_eq!(id.order, 0);
        assert_eq!(id.max_invariant_dim, Some(2));
        assert_eq!(anti_invariance_order(&linear_sbox(3, 7)).order, 0);
        let cube = cube_sbox(3).unwrap();
        let brute = brute_max_invariant_dim(&cube);
        assert_eq!(brute, Some(1));
        let got = anti_invariance_order(&cube);
        assert_eq!(got.max_invariant_dim, brute);
        assert_eq!(got.order, 1);
        assert!(!got.normalized);
    }

    #[test]
    fn anti_invariance_matches_brute_force_on_random_boxes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let f = random_sbox(3, &mut rng);
            let got = anti_invariance_order(&f);
            assert_eq!(got.max_invariant_dim, brute_max_invariant_dim(&f));
            assert_eq!(got.normalized, f.apply(0) != 0);
        }
    }

    #[test]
    fn parallel_examples() {
        let l = BrickLayout::new(3, 2).unwrap();
        let id = ParallelSBox::identity(l);
        assert_eq!(
            parallel_apply(&id, BitVec::new(0b101_011, 6).unwrap())
                .unwrap()
                .bits(),
            0b101_011
        );
        let f = cube_sbox(3).unwrap();
        let g = SBox::new(3, vec![7, 6, 5, 4, 3, 2, 1, 0]).unwrap();
        let p = ParallelSBox::new(l, vec![f.clone(), g.clone()]).unwrap();
        let (u, v) = (0b011, 0b110);
        assert_eq!(p.apply(v << 3 | u), g.apply(v) << 3 | f.apply(u));
        assert!(parallel_apply(&p, BitVec::new(1, 5).unwrap()).is_err());
        assert!(ParallelSBox::new(l, vec![f]).is_err());
    }

    #[test]
    fn wall_cosets_map_to_wall_cosets() {
        let l = BrickLayout::new(3, 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let p = ParallelSBox::new(l, vec![random_sbox(3, &mut rng), random_sbox(3, &mut rng)])
                .unwrap();
            for wall in l.walls() {
                let w = wall.subspace();
                for v in 0..64 {
                    let img: BTreeSet<Word> = w.elements().map(|x| p.apply(x ^ v)).collect();
                    let base = *img.iter().next().unwrap();
                    let shifted: BTreeSet<Word> = img.iter().map(|&y| y ^ base).collect();
                    let wall_set: BTreeSet<Word> = w.elements().collect();
                    assert_eq!(shifted, wall_set);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn ddt_rows_sum_and_even(seed in any::<u64>(), s in 2u32..6) {
            let f = random_sbox(s, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let d = ddt(&f);
            for a in 0..(1u32 << s) {
                prop_assert_eq!(d.row(a).iter().sum::<u32>(), 1 << s);
                prop_assert!(d.row(a).iter().all(|c| c % 2 == 0));
            }
            prop_assert_eq!(differential_uniformity(&f), differential_uniformity(&f.inverse()));
        }

        #[test]
        fn invariant_dim_preserved_by_linear_equivalence(seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let f = random_sbox(3, &mut rng).normalized();
            let g = random_linear_equivalent(&f, &mut rng);
            prop_assert_eq!(anti_invariance_order(&f).max_invariant_dim, anti_invariance_order(&g).max_invariant_dim);
            prop_assert_eq!(differential_uniformity(&f), differential_uniformity(&g));
        }
    }
}

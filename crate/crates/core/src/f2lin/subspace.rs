use super::{check_width, lead, mask, BitVec, Word};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A subspace of `(F2)^width` in canonical reduced row-echelon form.
///
/// The basis is sorted by leading (highest) bit, descending, and every
/// leading bit is zero in all other basis vectors. Two subspaces are equal
/// as sets iff their bases are identical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subspace {
    width: u32,
    basis: Vec<Word>,
}

/// Canonical echelon basis of the span of `vectors`.
pub fn rref_basis(vectors: &[BitVec], width: u32) -> Result<Subspace> {
    check_width(width)?;
    let mut s = Subspace::zero(width);
    for v in vectors {
        if v.width() != width {
            return Err(Error::WidthMismatch {
                expected: width,
                found: v.width(),
            });
        }
        s.insert(v.bits());
    }
    Ok(s)
}

impl Subspace {
    /// The zero subspace. Widths are validated by the public constructors;
    /// internal callers pass widths already checked.
    pub fn zero(width: u32) -> Self {
        debug_assert!((1..=32).contains(&width));
        Subspace {
            width,
            basis: Vec::new(),
        }
    }

    pub fn full(width: u32) -> Self {
        Subspace {
            width,
            basis: (0..width).rev().map(|i| 1 << i).collect(),
        }
    }

    /// Span of raw words. Words must fit in `width` bits.
    pub fn span<I: IntoIterator<Item = Word>>(width: u32, words: I) -> Self {
        let mut s = Subspace::zero(width);
        for w in words {
            debug_assert!(w & !mask(width) == 0, "word {w:#x} exceeds width {width}");
            s.insert(w);
        }
        s
    }

    /// Checked variant of [`Subspace::span`].
    pub fn try_span<I: IntoIterator<Item = Word>>(width: u32, words: I) -> Result<Self> {
        check_width(width)?;
        let mut s = Subspace::zero(width);
        for w in words {
            if w & !mask(width) != 0 {
                return Err(Error::ValueOutOfRange { value: w, width });
            }
            s.insert(w);
        }
        Ok(s)
    }

    /// Builds a subspace from a basis already in canonical form.
    pub(crate) fn from_canonical(width: u32, basis: Vec<Word>) -> Self {
        debug_assert!(is_canonical(&basis));
        Subspace { width, basis }
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.basis.len() as u32
    }

    #[inline]
    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    /// Number of elements, `2^dim`.
    pub fn size(&self) -> u64 {
        1u64 << self.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.width
    }

    /// Neither `{0}` nor the whole space.
    pub fn is_proper_nontrivial(&self) -> bool {
        !self.is_zero() && !self.is_full()
    }

    /// Mask of the pivot (leading) bits.
    pub fn pivot_mask(&self) -> Word {
        self.basis.iter().fold(0, |m, &b| m | (1 << lead(b)))
    }

    /// Reduces `w` by the basis. The result is the canonical coset
    /// representative: it has zeros at every pivot and is the numerically
    /// smallest element of `w + U`.
    #[inline]
    pub fn reduce(&self, mut w: Word) -> Word {
        for &b in &self.basis {
            if (w >> lead(b)) & 1 == 1 {
                w ^= b;
            }
        }
        w
    }

    #[inline]
    pub fn contains(&self, w: Word) -> bool {
        self.reduce(w) == 0
    }

    /// Adds `w` to the spanning set; returns whether the dimension grew.
    pub fn insert(&mut self, w: Word) -> bool {
        let w = self.reduce(w);
        if w == 0 {
            return false;
        }
        let p = lead(w);
        for b in &mut self.basis {
            if (*b >> p) & 1 == 1 {
                *b ^= w;
            }
        }
        let pos = self
            .basis
            .iter()
            .position(|&b| lead(b) < p)
            .unwrap_or(self.basis.len());
        self.basis.insert(pos, w);
        true
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.width == other.width && self.basis.iter().all(|&b| other.contains(b))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for &b in &other.basis {
            s.insert(b);
        }
        s
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        // Zassenhaus: rows (u | u) for u in self and (w | 0) for w in other,
        // echelonized with the left block high; rows with zero left block
        // carry the intersection in their right block. Widths ≤ 16 fit in
        // one word; wider spaces fall back to enumeration of the smaller one.
        if self.width <= 16 {
            let w = self.width;
            let mut z = Subspace::zero(2 * w);
            for &u in &self.basis {
                z.insert((u << w) | u);
            }
            for &v in &other.basis {
                z.insert(v << w);
            }
            Subspace::span(w, z.basis.iter().filter(|&&b| b >> w == 0).copied())
        } else {
            let (small, big) = if self.dim() <= other.dim() {
                (self, other)
            } else {
                (other, self)
            };
            Subspace::span(self.width, small.elements().filter(|&x| big.contains(x)))
        }
    }

    /// Element of the span selected by the pivot bits of `x`. For `x` in the
    /// subspace this returns `x` itself; in general it is the unique element
    /// agreeing with `x` on the pivots.
    #[inline]
    pub fn combine_by_pivots(&self, x: Word) -> Word {
        self.basis
            .iter()
            .filter(|&&b| (x >> lead(b)) & 1 == 1)
            .fold(0, |acc, &b| acc ^ b)
    }

    /// Coordinates of `x ∈ U` in the echelon basis, as a bitmask over
    /// basis indices.
    pub fn coordinates(&self, x: Word) -> Word {
        self.basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| (x >> lead(b)) & 1 == 1)
            .fold(0, |acc, (i, _)| acc | (1 << i))
    }

    /// Element with coordinate bitmask `coords` over the basis.
    #[inline]
    pub fn element(&self, coords: u64) -> Word {
        let mut acc = 0;
        let mut c = coords;
        while c != 0 {
            let i = c.trailing_zeros() as usize;
            acc ^= self.basis[i];
            c &= c - 1;
        }
        acc
    }

    /// All elements, in Gray-code order starting at 0.
    pub fn elements(&self) -> impl Iterator<Item = Word> + '_ {
        let total = self.size();
        let mut cur: Word = 0;
        (0..total).map(move |i| {
            if i > 0 {
                cur ^= self.basis[i.trailing_zeros() as usize];
            }
            cur
        })
    }

    /// Canonical representatives of all cosets of the subspace: the words
    /// with zeros at every pivot bit.
    pub fn coset_reps(&self) -> impl Iterator<Item = Word> {
        let free: Vec<u32> = (0..self.width)
            .filter(|&i| (self.pivot_mask() >> i) & 1 == 0)
            .collect();
        let count = 1u64 << free.len();
        (0..count).map(move |c| deposit(c, &free))
    }

    /// Span of the images of the basis under a linear map given as a closure.
    pub fn image<F: Fn(Word) -> Word>(&self, width: u32, f: F) -> Subspace {
        Subspace::span(width, self.basis.iter().map(|&b| f(b)))
    }

    /// Basis words as `BitVec`s.
    pub fn basis_vectors(&self) -> Vec<BitVec> {
        self.basis
            .iter()
            .map(|&b| BitVec::new(b, self.width).expect("basis word in range"))
            .collect()
    }
}

/// Scatters the low bits of `c` into the listed positions.
#[inline]
pub(crate) fn deposit(c: u64, positions: &[u32]) -> Word {
    positions
        .iter()
        .enumerate()
        .filter(|(j, _)| (c >> j) & 1 == 1)
        .fold(0, |acc, (_, &p)| acc | (1 << p))
}

fn is_canonical(basis: &[Word]) -> bool {
    let pivots: Vec<u32> = basis
        .iter()
        .map(|&b| if b == 0 { 99 } else { lead(b) })
        .collect();
    if pivots.contains(&99) || pivots.windows(2).any(|w| w[0] <= w[1]) {
        return false;
    }
    basis.iter().enumerate().all(|(i, &b)| {
        pivots
            .iter()
            .enumerate()
            .all(|(j, &p)| i == j || (b >> p) & 1 == 0)
    })
}

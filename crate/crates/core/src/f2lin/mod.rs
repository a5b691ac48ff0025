//! Bit-packed linear algebra over F2.
//!
//! Vectors of `(F2)^n` are packed into a [`Word`] with coordinate 1 in the
//! least-significant bit. Subspaces are kept in a canonical reduced
//! row-echelon form so that set equality is plain structural equality.
//! Widths up to 32 are accepted so that subgroups of `V×V` (with `n ≤ 16`)
//! share the same machinery as subspaces of `V`.

mod bricks;
mod enumerate;
mod linmap;
mod subspace;

pub use bricks::{as_wall, wall_subspace, BrickLayout, Wall};
pub use enumerate::{enumerate_subspaces, subspace_shards, PivotPattern, SubspaceIter};
pub use linmap::{is_affine, is_affine_map, LinearMap};
pub(crate) use subspace::deposit as deposit_bits;
pub use subspace::{rref_basis, Subspace};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::BitXor;

/// Packed vector word. Bit `i` holds coordinate `i + 1`.
pub type Word = u32;

/// Largest width of any packed vector (pairs of 16-bit halves).
pub const MAX_WIDTH: u32 = 32;

/// Largest width of the half space `V`.
pub const MAX_HALF_WIDTH: u32 = 16;

/// Mask with the low `width` bits set.
#[inline]
pub fn mask(width: u32) -> Word {
    if width >= 32 {
        Word::MAX
    } else {
        (1 << width) - 1
    }
}

/// Position of the highest set bit of a non-zero word.
#[inline]
pub(crate) fn lead(w: Word) -> u32 {
    debug_assert!(w != 0);
    31 - w.leading_zeros()
}

pub(crate) fn check_width(width: u32) -> Result<()> {
    if width == 0 || width > MAX_WIDTH {
        Err(Error::WidthOutOfRange(width))
    } else {
        Ok(())
    }
}

/// Checks that `table` is a full function table on `(F2)^width`.
pub(crate) fn check_table(table: &[Word], width: u32) -> Result<()> {
    let expected = 1usize << width;
    if table.len() != expected {
        return Err(Error::TableSize {
            expected,
            found: table.len(),
        });
    }
    let m = mask(width);
    if let Some((index, &value)) = table.iter().enumerate().find(|(_, &v)| v & !m != 0) {
        return Err(Error::EntryOutOfRange {
            index,
            value,
            width,
        });
    }
    Ok(())
}

/// Checks that `table` is a permutation of `(F2)^width`.
pub(crate) fn check_permutation(table: &[Word], width: u32) -> Result<()> {
    check_table(table, width)?;
    let mut seen = vec![usize::MAX; table.len()];
    for (index, &value) in table.iter().enumerate() {
        let slot = &mut seen[value as usize];
        if *slot != usize::MAX {
            return Err(Error::NotPermutation {
                index,
                value,
                first: *slot,
            });
        }
        *slot = index;
    }
    Ok(())
}

/// Inverse of a permutation table.
pub(crate) fn invert_table(table: &[Word]) -> Vec<Word> {
    let mut inv = vec![0; table.len()];
    for (x, &y) in table.iter().enumerate() {
        inv[y as usize] = x as Word;
    }
    inv
}

/// An element of `(F2)^n` together with its width.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitVec {
    bits: Word,
    width: u32,
}

impl BitVec {
    pub fn new(bits: Word, width: u32) -> Result<Self> {
        check_width(width)?;
        if bits & !mask(width) != 0 {
            return Err(Error::ValueOutOfRange { value: bits, width });
        }
        Ok(BitVec { bits, width })
    }

    pub fn zero(width: u32) -> Result<Self> {
        Self::new(0, width)
    }

    /// Unit vector `e_i` (1-based coordinate).
    pub fn unit(i: u32, width: u32) -> Result<Self> {
        if i == 0 || i > width {
            return Err(Error::Parameter(format!(
                "coordinate {i} outside 1..={width}"
            )));
        }
        Self::new(1 << (i - 1), width)
    }

    #[inline]
    pub fn bits(self) -> Word {
        self.bits
    }

    #[inline]
    pub fn width(self) -> u32 {
        self.width
    }

    pub fn checked_xor(self, other: BitVec) -> Result<BitVec> {
        if self.width != other.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                found: other.width,
            });
        }
        Ok(BitVec {
            bits: self.bits ^ other.bits,
            width: self.width,
        })
    }
}

impl BitXor for BitVec {
    type Output = BitVec;

    /// # Panics
    /// Panics if the widths differ; use [`BitVec::checked_xor`] otherwise.
    fn bitxor(self, rhs: BitVec) -> BitVec {
        self.checked_xor(rhs)
            .expect("xor of BitVecs with different widths")
    }
}

impl fmt::Display for BitVec {
    /// Coordinates printed from `x_1` to `x_n`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width {
            write!(f, "{}", (self.bits >> i) & 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitvec_bounds() {
        assert!(BitVec::new(8, 3).is_err());
        assert!(BitVec::new(7, 3).is_ok());
        assert!(BitVec::new(0, 0).is_err());
        assert_eq!(BitVec::unit(3, 3).unwrap().bits(), 4);
        assert!(BitVec::unit(0, 3).is_err());
    }

    #[test]
    fn xor_widths() {
        let a = BitVec::new(0b101, 3).unwrap();
        let b = BitVec::new(0b011, 3).unwrap();
        assert_eq!((a ^ b).bits(), 0b110);
        assert!(a.checked_xor(BitVec::new(1, 4).unwrap()).is_err());
    }

    #[test]
    fn permutation_check_names_index() {
        let err = check_permutation(&[0, 1, 1, 3], 2).unwrap_err();
        assert_eq!(
            err,
            Error::NotPermutation {
                index: 2,
                value: 1,
                first: 1
            }
        );
        assert!(check_permutation(&[3, 1, 0, 2], 2).is_ok());
        assert!(matches!(
            check_table(&[0, 1, 2], 2),
            Err(Error::TableSize { .. })
        ));
        assert!(matches!(
            check_table(&[0, 1, 2, 4], 2),
            Err(Error::EntryOutOfRange { index: 3, .. })
        ));
    }
}

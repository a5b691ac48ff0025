use super::{check_permutation, check_table, check_width, mask, BitVec, Subspace, Word};
use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A linear map of `(F2)^n`, stored by rows: row `i` is the image of `e_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearMap {
    width: u32,
    rows: Vec<Word>,
}

impl LinearMap {
    pub fn new(width: u32, rows: Vec<Word>) -> Result<Self> {
        check_width(width)?;
        if rows.len() != width as usize {
            return Err(Error::TableSize {
                expected: width as usize,
                found: rows.len(),
            });
        }
        if let Some((index, &value)) = rows
            .iter()
            .enumerate()
            .find(|(_, &r)| r & !mask(width) != 0)
        {
            return Err(Error::EntryOutOfRange {
                index,
                value,
                width,
            });
        }
        Ok(LinearMap { width, rows })
    }

    pub fn identity(width: u32) -> Self {
        LinearMap {
            width,
            rows: (0..width).map(|i| 1 << i).collect(),
        }
    }

    /// Map sending brick `j` onto brick `perm[j]` coordinate-wise
    /// (0-based brick indices).
    pub fn brick_permutation(s: u32, perm: &[u32]) -> Result<Self> {
        let b = perm.len() as u32;
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= b || std::mem::replace(&mut seen[p as usize], true) {
                return Err(Error::Parameter(format!(
                    "{perm:?} is not a brick permutation"
                )));
            }
        }
        let rows = (0..s * b)
            .map(|i| 1 << (perm[(i / s) as usize] * s + i % s))
            .collect();
        Self::new(s * b, rows)
    }

    /// Uniformly random invertible map.
    pub fn random_invertible<R: Rng + ?Sized>(width: u32, rng: &mut R) -> Self {
        loop {
            let rows: Vec<Word> = (0..width)
                .map(|_| rng.gen::<Word>() & mask(width))
                .collect();
            let m = LinearMap { width, rows };
            if m.is_invertible() {
                return m;
            }
        }
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn rows(&self) -> &[Word] {
        &self.rows
    }

    #[inline]
    pub fn apply(&self, x: Word) -> Word {
        let mut acc = 0;
        let mut x = x;
        while x != 0 {
            acc ^= self.rows[x.trailing_zeros() as usize];
            x &= x - 1;
        }
        acc
    }

    pub fn apply_vec(&self, x: BitVec) -> Result<BitVec> {
        if x.width() != self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                found: x.width(),
            });
        }
        BitVec::new(self.apply(x.bits()), self.width)
    }

    pub fn rank(&self) -> u32 {
        Subspace::span(self.width, self.rows.iter().copied()).dim()
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.width
    }

    pub fn inverse(&self) -> Result<LinearMap> {
        if !self.is_invertible() {
            return Err(Error::Singular);
        }
        let table = self.table();
        let mut inv = vec![0; table.len()];
        for (x, &y) in table.iter().enumerate() {
            inv[y as usize] = x as Word;
        }
        let rows = (0..self.width).map(|i| inv[1 << i]).collect();
        Ok(LinearMap {
            width: self.width,
            rows,
        })
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &LinearMap) -> Result<LinearMap> {
        if self.width != other.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                found: other.width,
            });
        }
        Ok(LinearMap {
            width: self.width,
            rows: self.rows.iter().map(|&r| other.apply(r)).collect(),
        })
    }

    /// Full value table, index = input word.
    pub fn table(&self) -> Vec<Word> {
        let size = 1usize << self.width;
        let mut t = vec![0; size];
        for x in 1..size {
            let low = x & (x - 1);
            t[x] = t[low] ^ self.rows[(x ^ low).trailing_zeros() as usize];
        }
        t
    }

    /// Linear map whose value table is `table`, if `table` is linear.
    pub fn from_table(width: u32, table: &[Word]) -> Option<LinearMap> {
        check_table(table, width).ok()?;
        let m = LinearMap {
            width,
            rows: (0..width).map(|i| table[1 << i]).collect(),
        };
        (m.table() == table).then_some(m)
    }
}

/// Affinity test for a permutation table: `x ↦ f(x) + f(0)` must be linear.
pub fn is_affine(table: &[Word], width: u32) -> Result<bool> {
    check_permutation(table, width)?;
    Ok(affine_check(table, width))
}

/// Affinity test for an arbitrary map `(F2)^n → (F2)^n`.
pub fn is_affine_map(table: &[Word], width: u32) -> Result<bool> {
    check_table(table, width)?;
    Ok(affine_check(table, width))
}

fn affine_check(table: &[Word], width: u32) -> bool {
    let c = table[0];
    let g = |x: usize| table[x] ^ c;
    // quick rejection on pairs of basis vectors
    for i in 0..width {
        for j in (i + 1)..width {
            let (a, b) = (1usize << i, 1usize << j);
            if g(a | b) != g(a) ^ g(b) {
                return false;
            }
        }
    }
    let lin = LinearMap {
        width,
        rows: (0..width).map(|i| g(1 << i)).collect(),
    };
    lin.table().iter().enumerate().all(|(x, &y)| y == g(x))
}

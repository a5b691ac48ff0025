//! Small S-box catalogue: power maps over `F_{2^s}` and seeded random boxes.

use super::SBox;
use crate::error::{Error, Result};
use crate::f2lin::{LinearMap, Word};
use rand::seq::SliceRandom;
use rand::Rng;

/// Primitive polynomials (with the leading term) for `F_{2^s}`, `s = 1..=8`.
const PRIMITIVE_POLY: [u32; 9] = [
    0,
    0b11,
    0b111,
    0b1011,
    0b10011,
    0b100101,
    0b1000011,
    0b10000011,
    0b100011101,
];

/// Multiplication in `F_{2^s}` modulo the fixed primitive polynomial
/// (`x^3 + x + 1` for `s = 3`).
pub fn gf_mul(a: Word, b: Word, s: u32) -> Word {
    let poly = PRIMITIVE_POLY[s as usize];
    let (mut a, mut b, mut acc) = (a, b, 0);
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if (a >> s) & 1 == 1 {
            a ^= poly;
        }
    }
    acc
}

/// Value table of `x ↦ x^3` over `F_{2^s}`.
pub fn cube_table(s: u32) -> Vec<Word> {
    assert!((1..=8).contains(&s), "field width {s} unsupported");
    (0..1 << s).map(|x| gf_mul(gf_mul(x, x, s), x, s)).collect()
}

/// The cube map as an S-box. It is an APN permutation for odd `s`.
pub fn cube_sbox(s: u32) -> Result<SBox> {
    if !(1..=8).contains(&s) {
        return Err(Error::Parameter(format!("field width {s} unsupported")));
    }
    SBox::new(s, cube_table(s))
}

/// Seeded uniformly random permutation.
pub fn random_sbox<R: Rng + ?Sized>(s: u32, rng: &mut R) -> SBox {
    let mut t: Vec<Word> = (0..1 << s).collect();
    t.shuffle(rng);
    SBox::new(s, t).expect("shuffle is a permutation")
}

/// `L2 ∘ f ∘ L1` for random invertible linear `L1`, `L2`. Preserves the
/// differential uniformity, the invariant-subspace structure, and `f(0)=0`.
pub fn random_linear_equivalent<R: Rng + ?Sized>(f: &SBox, rng: &mut R) -> SBox {
    let s = f.width();
    let l1 = LinearMap::random_invertible(s, rng);
    let l2 = LinearMap::random_invertible(s, rng);
    let t = (0..1 << s)
        .map(|x| l2.apply(f.apply(l1.apply(x))))
        .collect();
    SBox::new(s, t).expect("composition of permutations")
}

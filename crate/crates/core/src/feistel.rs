//! Feistel operator, round functions and long-key encryption.
//!
//! Pairs `(x1, x2) ∈ V×V` are packed with `x1` in the low `n` bits. The
//! Feistel operator of `ρ` is `ρ̄(x1, x2) = (x2, x1 + ρ(x2))`.

use crate::error::{Error, Result};
use crate::f2lin::{check_table, is_affine_map, mask, BitVec, BrickLayout, LinearMap, Word};
use crate::goursat::{pack, unpack};
use crate::sboxprops::ParallelSBox;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// How a generating function is given.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundForm {
    /// `x ↦ λ(γ(x))`.
    Composed {
        gamma: ParallelSBox,
        lambda: LinearMap,
    },
    /// Any map `V → V` as a value table.
    Raw { width: u32, table: Vec<Word> },
}

/// A generating function `ρ` with its value table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RoundForm", into = "RoundForm")]
pub struct GeneratingFunction {
    form: RoundForm,
    table: Vec<Word>,
}

impl TryFrom<RoundForm> for GeneratingFunction {
    type Error = Error;

    fn try_from(form: RoundForm) -> Result<Self> {
        match form {
            RoundForm::Composed { gamma, lambda } => Self::composed(gamma, lambda),
            RoundForm::Raw { width, table } => Self::raw(width, table),
        }
    }
}

impl From<GeneratingFunction> for RoundForm {
    fn from(g: GeneratingFunction) -> RoundForm {
        g.form
    }
}

impl GeneratingFunction {
    pub fn composed(gamma: ParallelSBox, lambda: LinearMap) -> Result<Self> {
        let n = gamma.layout().width();
        if lambda.width() != n {
            return Err(Error::WidthMismatch {
                expected: n,
                found: lambda.width(),
            });
        }
        let table = (0..1 << n).map(|x| lambda.apply(gamma.apply(x))).collect();
        Ok(GeneratingFunction {
            form: RoundForm::Composed { gamma, lambda },
            table,
        })
    }

    pub fn raw(width: u32, table: Vec<Word>) -> Result<Self> {
        if width == 0 || width > 16 {
            return Err(Error::WidthOutOfRange(width));
        }
        check_table(&table, width)?;
        Ok(GeneratingFunction {
            form: RoundForm::Raw {
                width,
                table: table.clone(),
            },
            table,
        })
    }

    pub fn identity(width: u32) -> Result<Self> {
        Self::raw(width, (0..1 << width).collect())
    }

    pub fn form(&self) -> &RoundForm {
        &self.form
    }

    pub fn width(&self) -> u32 {
        self.table.len().trailing_zeros()
    }

    #[inline]
    pub fn apply(&self, x: Word) -> Word {
        self.table[x as usize]
    }

    #[inline]
    pub fn table(&self) -> &[Word] {
        &self.table
    }

    pub fn is_composed(&self) -> bool {
        matches!(self.form, RoundForm::Composed { .. })
    }

    /// `ρ(0) = 0`.
    pub fn is_normalized(&self) -> bool {
        self.table[0] == 0
    }

    /// `x ↦ ρ(x) + ρ(0)`. A composed form keeps its shape, with every S-box
    /// normalized.
    pub fn normalized(&self) -> GeneratingFunction {
        match &self.form {
            RoundForm::Composed { gamma, lambda } => {
                Self::composed(gamma.normalized(), lambda.clone()).expect("widths already checked")
            }
            RoundForm::Raw { width, .. } => {
                let c = self.table[0];
                Self::raw(*width, self.table.iter().map(|y| y ^ c).collect())
                    .expect("table already checked")
            }
        }
    }

    pub fn is_affine(&self) -> bool {
        is_affine_map(&self.table, self.width()).expect("table already checked")
    }
}

/// `ρ̄` on a packed pair.
#[inline]
pub fn rho_bar(rho: &[Word], n: u32, x: Word) -> Word {
    let (x1, x2) = unpack(n, x);
    pack(n, x2, x1 ^ rho[x2 as usize])
}

/// `ρ̄⁻¹(y1, y2) = (y2 + ρ(y1), y1)`.
#[inline]
pub fn rho_bar_inverse(rho: &[Word], n: u32, y: Word) -> Word {
    let (y1, y2) = unpack(n, y);
    pack(n, y2 ^ rho[y1 as usize], y1)
}

/// The Feistel operator `ρ̄`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeistelOperator {
    rho: GeneratingFunction,
}

impl FeistelOperator {
    pub fn new(rho: GeneratingFunction) -> Self {
        FeistelOperator { rho }
    }

    pub fn rho(&self) -> &GeneratingFunction {
        &self.rho
    }

    pub fn n(&self) -> u32 {
        self.rho.width()
    }

    #[inline]
    pub fn apply(&self, x: Word) -> Word {
        rho_bar(self.rho.table(), self.n(), x)
    }

    #[inline]
    pub fn apply_inverse(&self, y: Word) -> Word {
        rho_bar_inverse(self.rho.table(), self.n(), y)
    }

    /// Value table on `V×V`; needs `2n ≤ 24`.
    pub fn table(&self) -> Result<Vec<Word>> {
        let w = 2 * self.n();
        if w > 24 {
            return Err(Error::Parameter(format!("table of width {w} is too large")));
        }
        Ok((0..1 << w).map(|x| self.apply(x)).collect())
    }
}

/// Checked `ρ̄` on a pair of vectors.
pub fn feistel_apply(op: &FeistelOperator, x1: BitVec, x2: BitVec) -> Result<(BitVec, BitVec)> {
    let n = op.n();
    for x in [x1, x2] {
        if x.width() != n {
            return Err(Error::WidthMismatch {
                expected: n,
                found: x.width(),
            });
        }
    }
    let (y1, y2) = unpack(n, op.apply(pack(n, x1.bits(), x2.bits())));
    Ok((BitVec::new(y1, n)?, BitVec::new(y2, n)?))
}

pub fn feistel_apply_inverse(
    op: &FeistelOperator,
    y1: BitVec,
    y2: BitVec,
) -> Result<(BitVec, BitVec)> {
    let n = op.n();
    for y in [y1, y2] {
        if y.width() != n {
            return Err(Error::WidthMismatch {
                expected: n,
                found: y.width(),
            });
        }
    }
    let (x1, x2) = unpack(n, op.apply_inverse(pack(n, y1.bits(), y2.bits())));
    Ok((BitVec::new(x1, n)?, BitVec::new(x2, n)?))
}

/// `λ(γ(x)) + k`.
pub fn classical_round(
    gamma: &ParallelSBox,
    lambda: &LinearMap,
    k: BitVec,
    x: BitVec,
) -> Result<BitVec> {
    let n = gamma.layout().width();
    for w in [lambda.width(), k.width(), x.width()] {
        if w != n {
            return Err(Error::WidthMismatch {
                expected: n,
                found: w,
            });
        }
    }
    BitVec::new(lambda.apply(gamma.apply(x.bits())) ^ k.bits(), n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeyMode {
    /// Round `(x1, x2) ↦ (x2, x1 + ρ(x2) + k)`.
    After,
    /// Round `(x1, x2) ↦ (x2, x1 + ρ(x2 + k))`.
    Before,
}

/// An `r`-round Feistel network over `V×V`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CipherSpec {
    layout: BrickLayout,
    rounds: Vec<GeneratingFunction>,
    key_mode: KeyMode,
}

impl CipherSpec {
    pub fn new(
        layout: BrickLayout,
        rounds: Vec<GeneratingFunction>,
        key_mode: KeyMode,
    ) -> Result<Self> {
        if rounds.is_empty() {
            return Err(Error::Parameter("a cipher needs at least one round".into()));
        }
        for (i, g) in rounds.iter().enumerate() {
            if g.width() != layout.width() {
                return Err(Error::Parameter(format!(
                    "round {} has width {}, layout has width {}",
                    i + 1,
                    g.width(),
                    layout.width()
                )));
            }
            if let RoundForm::Composed { gamma, .. } = g.form() {
                if gamma.layout() != layout {
                    return Err(Error::Parameter(format!(
                        "round {} uses a different brick layout",
                        i + 1
                    )));
                }
            }
        }
        Ok(CipherSpec {
            layout,
            rounds,
            key_mode,
        })
    }

    pub fn layout(&self) -> BrickLayout {
        self.layout
    }

    /// Width `n` of each half.
    pub fn n(&self) -> u32 {
        self.layout.width()
    }

    pub fn rounds(&self) -> &[GeneratingFunction] {
        &self.rounds
    }

    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    pub fn key_mode(&self) -> KeyMode {
        self.key_mode
    }

    pub fn with_key_mode(&self, key_mode: KeyMode) -> CipherSpec {
        CipherSpec {
            key_mode,
            ..self.clone()
        }
    }

    pub fn operator(&self, round: usize) -> FeistelOperator {
        FeistelOperator::new(self.rounds[round].clone())
    }
}

/// A long-key tuple `(k_1, …, k_r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoundKeys {
    n: u32,
    keys: Vec<Word>,
}

impl RoundKeys {
    pub fn new(n: u32, keys: Vec<Word>) -> Result<Self> {
        if let Some(&k) = keys.iter().find(|&&k| k & !mask(n) != 0) {
            return Err(Error::ValueOutOfRange { value: k, width: n });
        }
        Ok(RoundKeys { n, keys })
    }

    pub fn zero(n: u32, r: usize) -> Self {
        RoundKeys {
            n,
            keys: vec![0; r],
        }
    }

    pub fn random<R: Rng + ?Sized>(n: u32, r: usize, rng: &mut R) -> Self {
        RoundKeys {
            n,
            keys: (0..r).map(|_| rng.gen::<Word>() & mask(n)).collect(),
        }
    }

    /// Key with `k` in round `i` (0-based) and zero elsewhere.
    pub fn single(n: u32, r: usize, i: usize, k: Word) -> Result<Self> {
        let mut keys = vec![0; r];
        keys[i] = k;
        Self::new(n, keys)
    }

    /// The `index`-th tuple in the enumeration of `V^r`, round 1 lowest.
    pub fn nth(n: u32, r: usize, index: u64) -> Self {
        RoundKeys {
            n,
            keys: (0..r)
                .map(|i| ((index >> (i as u32 * n)) as Word) & mask(n))
                .collect(),
        }
    }

    pub fn keys(&self) -> &[Word] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

fn check_keys(spec: &CipherSpec, keys: &RoundKeys) -> Result<()> {
    if keys.len() != spec.round_count() {
        return Err(Error::KeyCount {
            expected: spec.round_count(),
            found: keys.len(),
        });
    }
    if keys.n != spec.n() {
        return Err(Error::WidthMismatch {
            expected: spec.n(),
            found: keys.n,
        });
    }
    Ok(())
}

/// Encryption of a packed pair.
pub fn encrypt(spec: &CipherSpec, keys: &RoundKeys, p: Word) -> Result<Word> {
    check_keys(spec, keys)?;
    if p & !mask(2 * spec.n()) != 0 {
        return Err(Error::ValueOutOfRange {
            value: p,
            width: 2 * spec.n(),
        });
    }
    Ok(encrypt_unchecked(spec, keys.keys(), p))
}

pub fn decrypt(spec: &CipherSpec, keys: &RoundKeys, c: Word) -> Result<Word> {
    check_keys(spec, keys)?;
    if c & !mask(2 * spec.n()) != 0 {
        return Err(Error::ValueOutOfRange {
            value: c,
            width: 2 * spec.n(),
        });
    }
    Ok(decrypt_unchecked(spec, keys.keys(), c))
}

#[inline]
pub(crate) fn encrypt_unchecked(spec: &CipherSpec, keys: &[Word], p: Word) -> Word {
    let n = spec.n();
    let (mut x1, mut x2) = unpack(n, p);
    for (g, &k) in spec.rounds.iter().zip(keys) {
        let t = g.table();
        let y2 = match spec.key_mode {
            KeyMode::After => x1 ^ t[x2 as usize] ^ k,
            KeyMode::Before => x1 ^ t[(x2 ^ k) as usize],
        };
        x1 = x2;
        x2 = y2;
    }
    pack(n, x1, x2)
}

#[inline]
pub(crate) fn decrypt_unchecked(spec: &CipherSpec, keys: &[Word], c: Word) -> Word {
    let n = spec.n();
    let (mut y1, mut y2) = unpack(n, c);
    for (g, &k) in spec.rounds.iter().zip(keys).rev() {
        let t = g.table();
        let x1 = match spec.key_mode {
            KeyMode::After => y2 ^ k ^ t[y1 as usize],
            KeyMode::Before => y2 ^ t[(y1 ^ k) as usize],
        };
        y2 = y1;
        y1 = x1;
    }
    pack(n, y1, y2)
}

/// Full encryption table under fixed keys; needs `2n ≤ 24`.
pub fn encryption_table(spec: &CipherSpec, keys: &RoundKeys) -> Result<Vec<Word>> {
    check_keys(spec, keys)?;
    let w = 2 * spec.n();
    if w > 24 {
        return Err(Error::Parameter(format!("table of width {w} is too large")));
    }
    Ok((0..1 << w)
        .map(|x| encrypt_unchecked(spec, keys.keys(), x))
        .collect())
}

/// One letter `E_K` or `E_K⁻¹` of a word in the encryption functions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Letter {
    pub keys: RoundKeys,
    pub inverse: bool,
}

/// Evaluates a word letter by letter from the left.
pub fn evaluate_word(spec: &CipherSpec, word: &[Letter], x: Word) -> Result<Word> {
    word.iter().try_fold(x, |acc, l| {
        if l.inverse {
            decrypt(spec, &l.keys, acc)
        } else {
            encrypt(spec, &l.keys, acc)
        }
    })
}

/// `E_{(h,0,…,0)} · E_0⁻¹ · E_0⁻¹ · E_{(0,…,0,k)}`, which acts as the
/// translation by `(h, k)` in key-after mode.
pub fn translation_witness(spec: &CipherSpec, h: Word, k: Word) -> Result<Vec<Letter>> {
    if spec.key_mode != KeyMode::After {
        return Err(Error::KeyBeforeMode);
    }
    let (n, r) = (spec.n(), spec.round_count());
    let zero = RoundKeys::zero(n, r);
    Ok(vec![
        Letter {
            keys: RoundKeys::single(n, r, 0, h)?,
            inverse: false,
        },
        Letter {
            keys: zero.clone(),
            inverse: true,
        },
        Letter {
            keys: zero,
            inverse: true,
        },
        Letter {
            keys: RoundKeys::single(n, r, r - 1, k)?,
            inverse: false,
        },
    ])
}

/// Checks the witness for `(h, k)` against `x ↦ x + (h, k)` on every point
/// (`2n ≤ 16`) and returns the number of points checked.
pub fn verify_translation_witness(spec: &CipherSpec, h: Word, k: Word) -> Result<u64> {
    let n = spec.n();
    if 2 * n > 16 {
        return Err(Error::Parameter(
            "exhaustive witness check needs 2n <= 16".into(),
        ));
    }
    let word = translation_witness(spec, h, k)?;
    let shift = pack(n, h, k);
    let size = 1u64 << (2 * n);
    for x in 0..size as Word {
        if evaluate_word(spec, &word, x)? != x ^ shift {
            return Err(Error::Internal(format!(
                "witness for (h,k)=({h},{k}) fails at {x}"
            )));
        }
    }
    Ok(size)
}

//! Generic partition attack: a same-coset distinguisher and last-round key
//! class recovery from a propagation chain.

use super::chain::{verify_chain, PartitionChain};
use crate::error::{Error, Result};
use crate::f2lin::{mask, Subspace, Word};
use crate::feistel::{encrypt_unchecked, CipherSpec, KeyMode, RoundKeys};
use crate::goursat::{decompose, PairSubgroup};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Cap on key-class tuples tried by [`recover_key_coset`].
pub const MAX_KEY_TUPLES: u64 = 1 << 24;

const MAX_BASELINE_WIDTH: u32 = 24;
const MAX_CHOSEN_PLAINTEXTS: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguisherReport {
    pub seed: u64,
    pub samples: usize,
    /// `dim 𝒰_{r+1}`.
    pub d: u32,
    pub hits: usize,
    pub hit_rate: f64,
    pub baseline_hits: usize,
    pub baseline_rate: f64,
    /// `(2^d − 1)/(2^{2n} − 1)`.
    pub expected_baseline: f64,
    /// Binomial standard error of the baseline rate.
    pub baseline_std_error: f64,
}

impl DistinguisherReport {
    /// Baseline deviation in standard errors.
    pub fn baseline_z(&self) -> f64 {
        (self.baseline_rate - self.expected_baseline) / self.baseline_std_error
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyRecovery {
    /// `D_{r+1} = 𝒰_{r+1} ∩ ({0}×V)`, read on the right half.
    pub key_subspace: Subspace,
    /// Canonical representatives of the `k_r + D_{r+1}` classes consistent
    /// with every observation.
    pub candidates: Vec<Word>,
    /// `n − dim D_{r+1}`: the content of one class.
    pub coset_bits: u32,
    /// `coset_bits − log2(#candidates)`. Distinct key tuples can induce the
    /// same map on cosets, so more than one class may survive.
    pub bits: f64,
    pub plaintexts: usize,
    pub tuples_tested: u64,
    /// Set when the true `k_r` was supplied.
    pub contains_true_key: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub method: String,
    pub distinguisher: Option<DistinguisherReport>,
    pub key_recovery: Option<KeyRecovery>,
}

impl AttackReport {
    pub fn new(
        distinguisher: Option<DistinguisherReport>,
        key_recovery: Option<KeyRecovery>,
    ) -> Self {
        AttackReport {
            method:
                "generic partition attack (same-coset distinguisher, last-round key class search)"
                    .into(),
            distinguisher,
            key_recovery,
        }
    }
}

fn random_nonzero(u: &PairSubgroup, rng: &mut ChaCha8Rng) -> Word {
    u.space().element(rng.gen_range(1..u.space().size()))
}

/// Samples `x` and a non-zero `u ∈ 𝒰₁` and counts pairs whose images under
/// `oracle` share a `𝒰_{r+1}`-coset. The same pairs are run through a seeded
/// random permutation for the baseline.
pub fn distinguish<F>(
    oracle: F,
    chain: &PartitionChain,
    samples: usize,
    seed: u64,
) -> Result<DistinguisherReport>
where
    F: Fn(Word) -> Word + Sync + Send,
{
    let n = chain.n();
    if !chain.first().is_proper_nontrivial() || !chain.last().is_proper_nontrivial() {
        return Err(Error::DegenerateChain(
            "distinguisher needs proper non-trivial end subgroups".into(),
        ));
    }
    if samples == 0 {
        return Err(Error::Parameter("at least one sample is needed".into()));
    }
    let w = 2 * n;
    if w > MAX_BASELINE_WIDTH {
        return Err(Error::Parameter(format!(
            "baseline permutation of width {w} is too large"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(Word, Word)> = (0..samples)
        .map(|_| {
            let x = rng.gen::<Word>() & mask(w);
            (x, x ^ random_nonzero(chain.first(), &mut rng))
        })
        .collect();
    let mut baseline: Vec<Word> = (0..1 << w).collect();
    baseline.shuffle(&mut rng);
    let last = chain.last().space();
    let hits = crate::par::count_indices(samples, |i| {
        let (x, y) = pairs[i];
        last.reduce(oracle(x)) == last.reduce(oracle(y))
    });
    let baseline_hits = crate::par::count_indices(samples, |i| {
        let (x, y) = pairs[i];
        last.reduce(baseline[x as usize]) == last.reduce(baseline[y as usize])
    });
    let d = chain.last().dim();
    let p = ((1u64 << d) - 1) as f64 / ((1u64 << w) - 1) as f64;
    let n_f = samples as f64;
    Ok(DistinguisherReport {
        seed,
        samples,
        d,
        hits,
        hit_rate: hits as f64 / n_f,
        baseline_hits,
        baseline_rate: baseline_hits as f64 / n_f,
        expected_baseline: p,
        baseline_std_error: (p * (1.0 - p) / n_f).sqrt(),
    })
}

/// [`distinguish`] against the keyed cipher, after checking the chain
/// against the spec.
pub fn distinguish_spec(
    spec: &CipherSpec,
    keys: &RoundKeys,
    chain: &PartitionChain,
    samples: usize,
    seed: u64,
) -> Result<DistinguisherReport> {
    let mut checked = chain.clone();
    verify_chain(spec, &mut checked)?;
    if keys.len() != spec.round_count() {
        return Err(Error::KeyCount {
            expected: spec.round_count(),
            found: keys.len(),
        });
    }
    distinguish(
        |x| encrypt_unchecked(spec, keys.keys(), x),
        &checked,
        samples,
        seed,
    )
}

/// Recovers the class of the last round key modulo `D_{r+1}`.
///
/// Adding `(0, d)` with `d ∈ D_{i+1}` after round `i` keeps the state in the
/// same `𝒰_{i+1}`-coset, so the ciphertext coset modulo `𝒰_{r+1}` depends on
/// the round keys only through their classes `k_i + D_{i+1}`. Every tuple of
/// classes is tried against chosen plaintexts, one per `𝒰₁`-coset, and the
/// last-round classes of the consistent tuples are reported. `keys_hidden`
/// is used only as the encryption oracle and to check the result.
pub fn recover_key_coset(
    spec: &CipherSpec,
    keys_hidden: &RoundKeys,
    chain: &PartitionChain,
) -> Result<KeyRecovery> {
    if spec.key_mode() != KeyMode::After {
        return Err(Error::KeyBeforeMode);
    }
    if keys_hidden.len() != spec.round_count() {
        return Err(Error::KeyCount {
            expected: spec.round_count(),
            found: keys_hidden.len(),
        });
    }
    let mut checked = chain.clone();
    verify_chain(spec, &mut checked)?;
    let n = spec.n();
    let r = spec.round_count();
    let classes: Vec<Vec<Word>> = checked.subgroups()[1..]
        .iter()
        .map(|u| decompose(u).d.coset_reps().collect())
        .collect();
    let total = classes
        .iter()
        .try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64))
        .unwrap_or(u64::MAX);
    if total > MAX_KEY_TUPLES {
        return Err(Error::SearchTooLarge(format!("{total} key-class tuples")));
    }
    let plaintexts: Vec<Word> = checked
        .first()
        .space()
        .coset_reps()
        .take(MAX_CHOSEN_PLAINTEXTS)
        .collect();
    let last = checked.last().space();
    let observed: Vec<Word> = plaintexts
        .iter()
        .map(|&p| last.reduce(encrypt_unchecked(spec, keys_hidden.keys(), p)))
        .collect();

    let tuple = |mut index: u64| -> Vec<Word> {
        classes
            .iter()
            .map(|c| {
                let k = c[(index % c.len() as u64) as usize];
                index /= c.len() as u64;
                k
            })
            .collect()
    };
    let indices: Vec<u64> = (0..total).collect();
    let mut candidates: Vec<Word> = crate::par::flat_map(&indices, |&i| {
        let keys = tuple(i);
        let ok = plaintexts
            .iter()
            .zip(&observed)
            .all(|(&p, &o)| last.reduce(encrypt_unchecked(spec, &keys, p)) == o);
        if ok {
            vec![keys[r - 1]]
        } else {
            Vec::new()
        }
    });
    candidates.sort_unstable();
    candidates.dedup();
    let key_subspace = decompose(checked.last()).d;
    let true_class = key_subspace.reduce(keys_hidden.keys()[r - 1]);
    let free = (n - key_subspace.dim()) as f64;
    Ok(KeyRecovery {
        coset_bits: n - key_subspace.dim(),
        bits: if candidates.is_empty() {
            0.0
        } else {
            free - (candidates.len() as f64).log2()
        },
        contains_true_key: Some(candidates.contains(&true_class)),
        key_subspace,
        candidates,
        plaintexts: plaintexts.len(),
        tuples_tested: total,
    })
}

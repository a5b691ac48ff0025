use crate::error::{Error, Result};
use crate::f2lin::{is_affine_map, Subspace, Word};
use crate::feistel::{rho_bar, rho_bar_inverse, CipherSpec, GeneratingFunction};
use crate::goursat::{decompose, pack, unpack, PairSubgroup};
use crate::partition::{maps_cosets_exactly, propagate_linear_map, propagate_linear_with};
use serde::{Deserialize, Serialize};

/// Subgroups `𝒰₁, …, 𝒰_{r+1}` of `V×V` with `L(𝒰_i)ρ̄_i = L(𝒰_{i+1})`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PartitionChain {
    subgroups: Vec<PairSubgroup>,
    /// `verified[i]`: link `i → i+1` checked on every coset.
    verified: Vec<bool>,
}

impl PartitionChain {
    /// An unverified chain; see [`verify_chain`].
    pub fn new(subgroups: Vec<PairSubgroup>) -> Result<Self> {
        if subgroups.len() < 2 {
            return Err(Error::DegenerateChain(
                "a chain needs at least two subgroups".into(),
            ));
        }
        let n = subgroups[0].n();
        if let Some(u) = subgroups.iter().find(|u| u.n() != n) {
            return Err(Error::WidthMismatch {
                expected: n,
                found: u.n(),
            });
        }
        if let Some(i) = subgroups.iter().position(|u| !u.is_proper_nontrivial()) {
            return Err(Error::DegenerateChain(format!(
                "subgroup {} is trivial or the whole space",
                i + 1
            )));
        }
        let links = subgroups.len() - 1;
        Ok(PartitionChain {
            subgroups,
            verified: vec![false; links],
        })
    }

    pub(crate) fn verified_unchecked(subgroups: Vec<PairSubgroup>) -> Self {
        let links = subgroups.len() - 1;
        PartitionChain {
            subgroups,
            verified: vec![true; links],
        }
    }

    pub fn n(&self) -> u32 {
        self.subgroups[0].n()
    }

    pub fn subgroups(&self) -> &[PairSubgroup] {
        &self.subgroups
    }

    pub fn first(&self) -> &PairSubgroup {
        &self.subgroups[0]
    }

    pub fn last(&self) -> &PairSubgroup {
        &self.subgroups[self.subgroups.len() - 1]
    }

    /// Number of rounds covered.
    pub fn rounds(&self) -> usize {
        self.subgroups.len() - 1
    }

    pub fn link_flags(&self) -> &[bool] {
        &self.verified
    }

    pub fn is_verified(&self) -> bool {
        self.verified.iter().all(|&v| v)
    }
}

/// Result of pushing a partition through the rounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Propagation {
    Complete(PartitionChain),
    /// Round `round` (1-based) does not map the partition onto a linear
    /// one; `prefix` holds `𝒰₁, …, 𝒰_round`.
    Failed {
        round: usize,
        prefix: Vec<PairSubgroup>,
    },
}

/// One round `ρ̄_i` as a permutation of `V×V`.
pub(crate) fn forward(rho: &GeneratingFunction, n: u32) -> impl Fn(Word) -> Word + '_ {
    move |x| rho_bar(rho.table(), n, x)
}

pub(crate) fn backward(rho: &GeneratingFunction, n: u32) -> impl Fn(Word) -> Word + '_ {
    move |x| rho_bar_inverse(rho.table(), n, x)
}

pub(crate) fn step_forward(
    spec: &CipherSpec,
    round: usize,
    u: &PairSubgroup,
) -> Option<PairSubgroup> {
    let n = spec.n();
    let w = propagate_linear_with(forward(&spec.rounds()[round], n), u.space())?;
    Some(PairSubgroup::new(n, w).expect("width preserved"))
}

pub(crate) fn step_backward(
    spec: &CipherSpec,
    round: usize,
    u: &PairSubgroup,
) -> Option<PairSubgroup> {
    let n = spec.n();
    let w = propagate_linear_with(backward(&spec.rounds()[round], n), u.space())?;
    Some(PairSubgroup::new(n, w).expect("width preserved"))
}

fn check_width(spec: &CipherSpec, u: &PairSubgroup) -> Result<()> {
    if u.n() != spec.n() {
        return Err(Error::WidthMismatch {
            expected: spec.n(),
            found: u.n(),
        });
    }
    Ok(())
}

/// Iterates `𝒰_{i+1} = 𝒰_iρ̄_i`. Round keys never matter: translations
/// preserve every linear partition.
pub fn propagate_chain(spec: &CipherSpec, u1: &PairSubgroup) -> Result<Propagation> {
    check_width(spec, u1)?;
    if !u1.is_proper_nontrivial() {
        return Err(Error::DegenerateChain(
            "the starting subgroup is trivial or the whole space".into(),
        ));
    }
    let mut subgroups = vec![u1.clone()];
    for round in 0..spec.round_count() {
        match step_forward(spec, round, subgroups.last().expect("non-empty")) {
            Some(next) => subgroups.push(next),
            None => {
                return Ok(Propagation::Failed {
                    round: round + 1,
                    prefix: subgroups,
                })
            }
        }
    }
    Ok(Propagation::Complete(PartitionChain::verified_unchecked(
        subgroups,
    )))
}

/// Chain through `anchor` at position `pos` (0-based, `0..=r`), extended
/// both ways.
pub(crate) fn chain_through(
    spec: &CipherSpec,
    pos: usize,
    anchor: &PairSubgroup,
) -> Option<PartitionChain> {
    let r = spec.round_count();
    let mut back = vec![anchor.clone()];
    for round in (0..pos).rev() {
        back.push(step_backward(spec, round, back.last()?)?);
    }
    back.reverse();
    for round in pos..r {
        let next = step_forward(spec, round, back.last()?)?;
        back.push(next);
    }
    Some(PartitionChain::verified_unchecked(back))
}

/// Rechecks every link on all cosets and records the flags in the chain.
/// Fails with the first broken link.
pub fn verify_chain(spec: &CipherSpec, chain: &mut PartitionChain) -> Result<()> {
    if chain.rounds() != spec.round_count() {
        return Err(Error::Parameter(format!(
            "chain covers {} rounds, cipher has {}",
            chain.rounds(),
            spec.round_count()
        )));
    }
    check_width(spec, chain.first())?;
    for i in 0..chain.rounds() {
        let ok =
            step_forward(spec, i, &chain.subgroups[i]).as_ref() == Some(&chain.subgroups[i + 1]);
        chain.verified[i] = ok;
        if !ok {
            return Err(Error::ChainNotVerified(i + 1));
        }
    }
    Ok(())
}

/// `(U₂ × U₁, U₁ × U₂)` for `L(U₁)ρ = L(U₂)`.
pub fn lift_partition(
    u1: &Subspace,
    u2: &Subspace,
    rho: &GeneratingFunction,
) -> Result<(PairSubgroup, PairSubgroup)> {
    let n = rho.width();
    if u1.width() != n || u2.width() != n {
        return Err(Error::WidthMismatch {
            expected: n,
            found: u1.width().max(u2.width()),
        });
    }
    if !maps_cosets_exactly(rho.table(), u1, u2) {
        return Err(Error::Precondition(
            "rho does not map L(U1) onto L(U2)".into(),
        ));
    }
    let lifted = (
        PairSubgroup::product(u2, u1)?,
        PairSubgroup::product(u1, u2)?,
    );
    if 2 * n <= 16 {
        verify_lift(&lifted.0, &lifted.1, rho)?;
    }
    Ok(lifted)
}

/// Checks `(𝒰₁ + (v, v'))ρ̄ = 𝒰₂ + (v', v + ρ(v'))` for every offset and
/// returns the number of offsets.
pub fn verify_lift(
    big_u1: &PairSubgroup,
    big_u2: &PairSubgroup,
    rho: &GeneratingFunction,
) -> Result<u64> {
    let n = rho.width();
    let t = rho.table();
    let target = |x: Word| {
        let (v, v2) = unpack(n, x);
        big_u2.space().reduce(pack(n, v2, v ^ t[v2 as usize]))
    };
    // every coset maps into the claimed coset...
    let inside = big_u1.space().coset_reps().all(|x| {
        let label = target(x);
        big_u1
            .space()
            .elements()
            .all(|u| big_u2.space().reduce(rho_bar(t, n, x ^ u)) == label)
    });
    // ...and the claimed coset depends only on the coset of the offset
    let size = 1u64 << (2 * n);
    let consistent = (0..size).all(|x| {
        let x = x as Word;
        target(x) == target(big_u1.space().reduce(x))
    });
    if !(inside && consistent && big_u1.dim() == big_u2.dim()) {
        return Err(Error::Internal("lifted pair does not propagate".into()));
    }
    Ok(size)
}

/// Subspace pairs `(U₁, W₁, U₂, W₂)` with `(U_i + v)ρ_i = W_i + ρ_i(v)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpnReduction {
    pub u1: Subspace,
    pub w1: Subspace,
    pub u2: Subspace,
    pub w2: Subspace,
    /// Taken from the `D` parts (`true`) or the `A` parts (`false`).
    pub from_d: bool,
    /// Coset images equal `W_i + vρ_i`. A non-injective `ρ_i` can only give
    /// `(U_i + v)ρ_i ⊆ W_i + vρ_i`, which is what is checked otherwise.
    pub exact: bool,
}

/// `(U + v)f ⊆ W + vf` for every `v`.
pub fn maps_cosets_into(f: &[Word], u: &Subspace, w: &Subspace) -> bool {
    (0..f.len() as Word).all(|x| w.contains(f[x as usize] ^ f[u.reduce(x) as usize]))
}

fn two_cycle_holds(rho: &GeneratingFunction, from: &PairSubgroup, to: &PairSubgroup) -> bool {
    propagate_linear_with(forward(rho, rho.width()), from.space()).as_ref() == Some(to.space())
}

/// Extracts SPN-level propagating pairs from a Feistel two-cycle
/// `L(𝒰₁)ρ̄₁ = L(𝒰₂)`, `L(𝒰₂)ρ̄₂ = L(𝒰₁)`.
pub fn reduce_to_spn(
    rho1: &GeneratingFunction,
    rho2: &GeneratingFunction,
    big_u1: &PairSubgroup,
    big_u2: &PairSubgroup,
) -> Result<SpnReduction> {
    let n = rho1.width();
    if rho2.width() != n || big_u1.n() != n || big_u2.n() != n {
        return Err(Error::WidthMismatch {
            expected: n,
            found: rho2.width(),
        });
    }
    for (i, rho) in [rho1, rho2].into_iter().enumerate() {
        if is_affine_map(rho.table(), n)? {
            return Err(Error::AffineGenerator(i + 1));
        }
    }
    if !big_u1.is_proper_nontrivial() || !big_u2.is_proper_nontrivial() {
        return Err(Error::DegenerateChain(
            "two-cycle subgroups must be proper and non-trivial".into(),
        ));
    }
    if !two_cycle_holds(rho1, big_u1, big_u2) {
        return Err(Error::Precondition(
            "first round does not map L(U1) onto L(U2)".into(),
        ));
    }
    if !two_cycle_holds(rho2, big_u2, big_u1) {
        return Err(Error::Precondition(
            "second round does not map L(U2) onto L(U1)".into(),
        ));
    }
    let t1 = decompose(big_u1);
    let t2 = decompose(big_u2);
    let d_pair = SpnReduction {
        u1: t1.d.clone(),
        w1: t2.d.clone(),
        u2: t2.d.clone(),
        w2: t1.d.clone(),
        from_d: true,
        exact: true,
    };
    let a_pair = SpnReduction {
        u1: t2.a.clone(),
        w1: t1.a.clone(),
        u2: t1.a,
        w2: t2.a,
        from_d: false,
        exact: true,
    };
    // the case split: D parts when both are proper, else A parts
    let order = if t1.d.is_proper_nontrivial() && t2.d.is_proper_nontrivial() {
        [d_pair, a_pair]
    } else {
        [a_pair, d_pair]
    };
    let injective = [rho1, rho2].map(|r| crate::f2lin::check_permutation(r.table(), n).is_ok());
    for cand in order {
        let checks = [
            (rho1, &cand.u1, &cand.w1, injective[0]),
            (rho2, &cand.u2, &cand.w2, injective[1]),
        ];
        let mut exact = true;
        let mut sound = true;
        for (rho, u, w, inj) in checks {
            let e = maps_cosets_exactly(rho.table(), u, w);
            exact &= e;
            sound &= u.is_proper_nontrivial()
                && w.is_proper_nontrivial()
                && (e || (!inj && maps_cosets_into(rho.table(), u, w)));
        }
        if sound {
            return Ok(SpnReduction { exact, ..cand });
        }
    }
    if injective.iter().all(|&i| i) {
        Err(Error::Internal("neither Goursat pair propagates".into()))
    } else {
        Err(Error::Precondition(
            "no proper SPN-level pair: a non-injective generating function collapses the cosets"
                .into(),
        ))
    }
}

/// `W` with `L(U)ρ = L(W)` for a generating function that may be any map.
pub fn spn_image(rho: &GeneratingFunction, u: &Subspace) -> Option<Subspace> {
    propagate_linear_map(rho.table(), u)
}

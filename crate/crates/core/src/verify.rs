//! Self-check suites run by `ptrap verify`. Each returns counted checks.

use crate::error::{Error, Result};
use crate::f2lin::{enumerate_subspaces, is_affine_map, BrickLayout, LinearMap, Subspace, Word};
use crate::feistel::{verify_translation_witness, CipherSpec, GeneratingFunction, KeyMode};
use crate::goursat::{check_propagation_conditions, decompose, subgroup_from_triple, PairSubgroup};
use crate::permgroup::{
    encryption_generators, is_imprimitive, minimal_blocks, translation, BlockSystem,
    StabilizerChain,
};
use crate::sboxprops::catalog::random_sbox;
use crate::sboxprops::{ParallelSBox, SBox};
use crate::trapdoor::{lift_partition, propagate_chain, verify_lift, weak_walls, Propagation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    Goursat,
    Feistel,
    Converse,
    Propsub,
    MicroGroup,
    All,
}

impl Scope {
    pub const SUITES: [Scope; 5] = [
        Scope::Goursat,
        Scope::Feistel,
        Scope::Converse,
        Scope::Propsub,
        Scope::MicroGroup,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scope::Goursat => "goursat",
            Scope::Feistel => "feistel",
            Scope::Converse => "converse",
            Scope::Propsub => "propsub",
            Scope::MicroGroup => "micro-group",
            Scope::All => "all",
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scope::SUITES
            .into_iter()
            .chain([Scope::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown verify scope '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub what: String,
    pub passed: u64,
    pub total: u64,
}

impl Check {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.ok() { "OK" } else { "FAILED" };
        write!(
            f,
            "[{}] {} {}/{} {verdict}",
            self.suite, self.what, self.passed, self.total
        )
    }
}

fn check(suite: Scope, what: impl Into<String>, passed: u64, total: u64) -> Check {
    Check {
        suite: suite.name().into(),
        what: what.into(),
        passed,
        total,
    }
}

/// Runs one suite, or every suite for [`Scope::All`].
pub fn run(scope: Scope, seed: u64) -> Result<Vec<Check>> {
    match scope {
        Scope::All => Scope::SUITES
            .into_iter()
            .try_fold(Vec::new(), |mut acc, s| {
                acc.extend(run(s, seed)?);
                Ok(acc)
            }),
        Scope::Goursat => goursat_suite(seed),
        Scope::Feistel => feistel_suite(seed),
        Scope::Converse => converse_suite(seed),
        Scope::Propsub => propsub_suite(seed),
        Scope::MicroGroup => micro_group_suite(),
    }
}

fn round_trips(n: u32, subgroups: impl Iterator<Item = Subspace>) -> Result<(u64, u64)> {
    let (mut ok, mut total) = (0, 0);
    for s in subgroups {
        let u = PairSubgroup::new(n, s)?;
        total += 1;
        if subgroup_from_triple(&decompose(&u)).as_ref() == Ok(&u) {
            ok += 1;
        }
    }
    Ok((ok, total))
}

/// Random subspace of `(F2)^w` spanned by a random number of random words.
pub fn random_subspace<R: Rng + ?Sized>(w: u32, rng: &mut R) -> Subspace {
    let k = rng.gen_range(0..=w);
    Subspace::span(w, (0..k).map(|_| rng.gen::<Word>() & crate::f2lin::mask(w)))
}

fn goursat_suite(seed: u64) -> Result<Vec<Check>> {
    let (ok, total) = round_trips(2, enumerate_subspaces(4, Some(&[0, 1, 2, 3, 4]))?)?;
    let mut out = vec![check(
        Scope::Goursat,
        "round-trips of all subgroups of (F2)^2 x (F2)^2",
        ok,
        total,
    )];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let randoms: Vec<Subspace> = (0..1000).map(|_| random_subspace(8, &mut rng)).collect();
    let (ok, total) = round_trips(4, randoms.into_iter())?;
    out.push(check(
        Scope::Goursat,
        "round-trips of random subgroups of (F2)^4 x (F2)^4",
        ok,
        total,
    ));
    Ok(out)
}

/// Random raw-table spec with `r` rounds on `V = (F2)^n`.
pub fn random_raw_spec<R: Rng + ?Sized>(n: u32, r: usize, rng: &mut R) -> Result<CipherSpec> {
    let rounds = (0..r)
        .map(|_| {
            GeneratingFunction::raw(n, (0..1 << n).map(|_| rng.gen_range(0..1 << n)).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    CipherSpec::new(BrickLayout::new(n, 1)?, rounds, KeyMode::After)
}

fn feistel_suite(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for r in [2, 4] {
        let spec = random_raw_spec(4, r, &mut rng)?;
        let (mut points, mut total) = (0, 0);
        for _ in 0..100 {
            let (h, k) = (rng.gen_range(0..16), rng.gen_range(0..16));
            total += 256;
            points += verify_translation_witness(&spec, h, k).unwrap_or(0);
        }
        out.push(check(
            Scope::Feistel,
            format!("translation witness points (n=4, r={r}, 100 key pairs)"),
            points,
            total,
        ));
    }
    let spec = random_raw_spec(4, 2, &mut rng)?;
    let ok = (0..16)
        .flat_map(|h| (0..16).map(move |k| (h, k)))
        .filter(|&(h, k)| verify_translation_witness(&spec, h, k) == Ok(256))
        .count();
    out.push(check(
        Scope::Feistel,
        "translation witnesses OK on 256/256 points, all (h,k) at n=4, r=2",
        ok as u64,
        256,
    ));
    Ok(out)
}

/// Lifts checked on every offset at `s = 3`, `b = 2`: wall propagations
/// through parallel boxes and a brick map, and arbitrary subspaces through
/// linear maps.
fn converse_suite(seed: u64) -> Result<Vec<Check>> {
    let layout = BrickLayout::new(3, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut ok, mut total) = (0, 0);
    for i in 0..120 {
        let (rho, u1, u2) = if i % 2 == 0 {
            let boxes: Vec<SBox> = (0..2).map(|_| random_sbox(3, &mut rng)).collect();
            let swap = rng.gen_bool(0.5);
            let lambda = LinearMap::brick_permutation(3, if swap { &[1, 0] } else { &[0, 1] })?;
            let rho = GeneratingFunction::composed(ParallelSBox::new(layout, boxes)?, lambda)?;
            let (v1, v2) = weak_walls(layout)?;
            let (a, b) = if rng.gen_bool(0.5) {
                (v1, v2)
            } else {
                (v2, v1)
            };
            let target = if swap { b.subspace() } else { a.subspace() };
            (rho, a.subspace(), target)
        } else {
            let lambda = LinearMap::random_invertible(6, &mut rng);
            let u = loop {
                let u = random_subspace(6, &mut rng);
                if u.is_proper_nontrivial() {
                    break u;
                }
            };
            let w = Subspace::span(6, u.basis().iter().map(|&x| lambda.apply(x)));
            (
                GeneratingFunction::composed(ParallelSBox::identity(layout), lambda)?,
                u,
                w,
            )
        };
        total += 1;
        if let Ok((a, b)) = lift_partition(&u1, &u2, &rho) {
            if verify_lift(&a, &b, &rho) == Ok(4096) {
                ok += 1;
            }
        }
    }
    Ok(vec![check(
        Scope::Converse,
        "lifted pairs propagating on all 4096 offsets (s=3, b=2)",
        ok,
        total,
    )])
}

/// Outcome of the `n = 2` scan of the propagation conditions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropsubScan {
    pub functions: usize,
    pub pairs_scanned: u64,
    pub propagating: u64,
    pub violations: u64,
    pub linear_clause_checked: u64,
    pub product_clause_checked: u64,
}

/// Every ordered pair of subgroups of `(F2)^2 × (F2)^2` under `functions`
/// random non-affine `ρ` with `ρ(0) = 0`.
pub fn propsub_scan(functions: usize, seed: u64) -> Result<PropsubScan> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<PairSubgroup> = enumerate_subspaces(4, Some(&[0, 1, 2, 3, 4]))?
        .map(|s| PairSubgroup::new(2, s))
        .collect::<Result<_>>()?;
    let mut scan = PropsubScan {
        functions,
        ..Default::default()
    };
    for _ in 0..functions {
        let rho = loop {
            let mut t: Vec<Word> = (0..4).map(|_| rng.gen_range(0..4)).collect();
            t[0] = 0;
            if !is_affine_map(&t, 2)? {
                break t;
            }
        };
        for u1 in &all {
            let image = Subspace::span(
                4,
                u1.space()
                    .elements()
                    .map(|x| crate::feistel::rho_bar(&rho, 2, x)),
            );
            for u2 in &all {
                scan.pairs_scanned += 1;
                if image != *u2.space() || u1.dim() != u2.dim() {
                    continue;
                }
                scan.propagating += 1;
                let rep = check_propagation_conditions(&rho, u1, u2)?;
                scan.linear_clause_checked += rep.linear_on_a2.is_some() as u64;
                scan.product_clause_checked += rep.product_swap.is_some() as u64;
                if !rep.all_hold() {
                    scan.violations += 1;
                }
            }
        }
    }
    Ok(scan)
}

fn propsub_suite(seed: u64) -> Result<Vec<Check>> {
    let scan = propsub_scan(8, seed)?;
    Ok(vec![check(
        Scope::Propsub,
        format!(
            "propagating subgroup pairs meeting every condition ({} pairs scanned, {} with D1=D2=0, {} products)",
            scan.pairs_scanned, scan.linear_clause_checked, scan.product_clause_checked
        ),
        scan.propagating - scan.violations,
        scan.propagating,
    )])
}

/// Two-round `n = 2` spec with `ρ(x1, x2) = (0, x1·x2)` in both rounds. The
/// subgroup `U × U`, `U = ⟨e2⟩`, propagates onto itself in every round.
pub fn micro_trapdoor_spec() -> Result<(CipherSpec, PairSubgroup)> {
    let rho: Vec<Word> = (0..4).map(|x| ((x & 1) & (x >> 1)) << 1).collect();
    let g = GeneratingFunction::raw(2, rho)?;
    let spec = CipherSpec::new(BrickLayout::new(2, 1)?, vec![g.clone(), g], KeyMode::After)?;
    let u = PairSubgroup::span(2, [0b0010, 0b1000])?;
    Ok((spec, u))
}

/// Outcome of the micro-scale group checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MicroGroupReport {
    pub generators: usize,
    pub translations_in_group: u64,
    pub chain_is_constant: bool,
    pub system: Option<BlockSystem>,
    pub system_invariant: bool,
    /// Block systems from pairs inside a `𝒰`-coset that refine `L(𝒰)`.
    pub pair_systems_refining: u64,
    pub pair_systems: u64,
    /// The first system found refines `L(𝒰)` or is refined by it.
    pub comparable_with_linear: bool,
}

/// Translation membership for the toy spec with `r` rounds, plus the block
/// checks on [`micro_trapdoor_spec`].
pub fn micro_group(toy: &CipherSpec) -> Result<(u64, MicroGroupReport)> {
    let gens = encryption_generators(toy)?;
    let chain = StabilizerChain::new(&gens)?;
    let members = (0..16)
        .filter(|&v| chain.contains(&translation(4, v)))
        .count() as u64;

    let (spec, u) = micro_trapdoor_spec()?;
    let chain_is_constant = match propagate_chain(&spec, &u)? {
        Propagation::Complete(c) => c.subgroups().iter().all(|x| *x == u),
        Propagation::Failed { .. } => false,
    };
    let gens = encryption_generators(&spec)?;
    let translations_in_group = (0..16)
        .filter(|&v| {
            StabilizerChain::new(&gens)
                .map(|c| c.contains(&translation(4, v)))
                .unwrap_or(false)
        })
        .count() as u64;
    let linear =
        BlockSystem::from_labels(&(0..16).map(|x| u.space().reduce(x)).collect::<Vec<_>>());
    let system = is_imprimitive(&gens)?;
    let system_invariant = system.as_ref().is_some_and(|s| s.is_invariant(&gens));
    let comparable_with_linear = system
        .as_ref()
        .is_some_and(|s| s.refines(&linear) || linear.refines(s));
    let mut pair_systems_refining = 0;
    let nonzero: Vec<Word> = u.space().elements().filter(|&x| x != 0).collect();
    for &x in &nonzero {
        let s = minimal_blocks(&gens, 0, x)?;
        pair_systems_refining += (s.refines(&linear) && s.is_invariant(&gens)) as u64;
    }
    Ok((
        members,
        MicroGroupReport {
            generators: gens.len(),
            translations_in_group,
            chain_is_constant,
            system,
            system_invariant,
            pair_systems_refining,
            pair_systems: nonzero.len() as u64,
            comparable_with_linear,
        },
    ))
}

fn micro_group_suite() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut out = Vec::new();
    let mut report = None;
    for r in [2, 4] {
        let toy = random_raw_spec(2, r, &mut rng)?;
        let (members, rep) = micro_group(&toy)?;
        let gens = 1u64 << (2 * r);
        out.push(check(
            Scope::MicroGroup,
            format!("translations of (F2)^4 in the group of {gens} encryptions (r={r})"),
            members,
            16,
        ));
        report = Some(rep);
    }
    let rep = report.expect("two runs");
    let found = rep.chain_is_constant && rep.system_invariant && rep.comparable_with_linear;
    out.push(check(
        Scope::MicroGroup,
        "invariant block system matching the constant chain",
        found as u64,
        1,
    ));
    out.push(check(
        Scope::MicroGroup,
        "minimal block systems inside the chain's cosets",
        rep.pair_systems_refining,
        rep.pair_systems,
    ));
    Ok(out)
}

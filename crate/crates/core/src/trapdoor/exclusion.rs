//! Hypothesis checks on the rounds and the four exclusion conditions on the
//! chains found by the searches.

use super::chain::{step_forward, PartitionChain};
use super::search::{search_trapdoor_chains, SearchFamily};
use crate::difflayer::{check_properness, DiffusionReport};
use crate::error::{Error, Result};
use crate::feistel::{CipherSpec, RoundForm};
use crate::goursat::decompose;
use crate::sboxprops::{analyze_sbox, is_weakly_uniform, SBox, SBoxReport};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Which S-box hypothesis the check uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `2^δ`-differentially uniform and strongly `(δ−1)`-anti-invariant.
    Standard,
    /// Weakly `2^δ`-uniform and strongly `δ`-anti-invariant.
    #[serde(rename = "weak")]
    WeakUniformity,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::WeakUniformity => "weak",
        }
    }

    /// Whether `f` satisfies the box hypothesis for this `δ`.
    pub fn admits(self, f: &SBox, report: &SBoxReport, delta: u32) -> bool {
        let order = report.anti_invariance.order;
        match self {
            Variant::Standard => report.delta <= 1 << delta && order + 1 >= delta,
            Variant::WeakUniformity => is_weakly_uniform(f, 1 << delta) && order >= delta,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Variant::Standard),
            "weak" | "weak-uniformity" => Ok(Variant::WeakUniformity),
            _ => Err(Error::Parameter(format!("unknown variant '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundHypotheses {
    /// 1-based.
    pub round: usize,
    /// `ρ(0) ≠ 0`; the round was analysed in normalized form.
    pub normalized: bool,
    pub boxes: Vec<SBoxReport>,
    /// `δ ∈ [1, s−1]` admissible for every box of this round.
    pub admissible_deltas: Vec<u32>,
    pub diffusion: DiffusionReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub variant: Variant,
    pub rounds: Vec<RoundHypotheses>,
    /// Smallest `δ` admissible in every round.
    pub best_delta: Option<u32>,
    pub sboxes_ok: bool,
    pub strongly_proper: bool,
    pub holds: bool,
}

/// Per-round box and diffusion checks. Raw rounds are an error.
pub fn check_hypotheses(spec: &CipherSpec, variant: Variant) -> Result<HypothesisCheck> {
    let s = spec.layout().brick_width();
    let mut rounds = Vec::with_capacity(spec.round_count());
    for (i, g) in spec.rounds().iter().enumerate() {
        let RoundForm::Composed { gamma, lambda } = g.form() else {
            return Err(Error::RawTableRound(i + 1));
        };
        let gamma = gamma.normalized();
        let boxes: Vec<SBoxReport> = gamma.boxes().iter().map(analyze_sbox).collect();
        let admissible_deltas = (1..s)
            .filter(|&d| {
                gamma
                    .boxes()
                    .iter()
                    .zip(&boxes)
                    .all(|(f, rep)| variant.admits(f, rep, d))
            })
            .collect();
        rounds.push(RoundHypotheses {
            round: i + 1,
            normalized: !g.is_normalized(),
            boxes,
            admissible_deltas,
            diffusion: check_properness(lambda, spec.layout())?,
        });
    }
    let best_delta = (1..s).find(|d| rounds.iter().all(|r| r.admissible_deltas.contains(d)));
    let strongly_proper = rounds.iter().all(|r| r.diffusion.strongly_proper);
    Ok(HypothesisCheck {
        variant,
        sboxes_ok: best_delta.is_some(),
        strongly_proper,
        holds: best_delta.is_some() && strongly_proper,
        best_delta,
        rounds,
    })
}

/// Which exclusion conditions a chain meets, each with the first 1-based
/// index `i` where it does.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainVerdict {
    pub chain: PartitionChain,
    pub found_by: Vec<SearchFamily>,
    /// `L(𝒰_{i+1})ρ̄_{i+1} = L(𝒰_i)`.
    pub two_cycle: Option<usize>,
    /// `𝒰_i, 𝒰_{i+1}, 𝒰_{i+2}` all products.
    pub three_products: Option<usize>,
    /// `D_i = D_{i+1} = {0}`.
    pub trivial_d: Option<usize>,
    /// `A_i = A_{i+1} = {0}`.
    pub trivial_a: Option<usize>,
}

impl ChainVerdict {
    pub fn satisfies_any(&self) -> bool {
        self.two_cycle.is_some()
            || self.three_products.is_some()
            || self.trivial_d.is_some()
            || self.trivial_a.is_some()
    }
}

/// Tests conditions 1 to 4 on a chain of the given spec.
pub fn chain_verdict(spec: &CipherSpec, chain: &PartitionChain) -> ChainVerdict {
    let u = chain.subgroups();
    let triples: Vec<_> = u.iter().map(decompose).collect();
    let r = chain.rounds();
    let two_cycle = (0..r.saturating_sub(1))
        .find(|&i| step_forward(spec, i + 1, &u[i + 1]).as_ref() == Some(&u[i]))
        .map(|i| i + 1);
    let three_products = (0..u.len().saturating_sub(2))
        .find(|&i| u[i..i + 3].iter().all(|x| x.is_product()))
        .map(|i| i + 1);
    let trivial_d = (0..r)
        .find(|&i| triples[i].d.is_zero() && triples[i + 1].d.is_zero())
        .map(|i| i + 1);
    let trivial_a = (0..r)
        .find(|&i| triples[i].a.is_zero() && triples[i + 1].a.is_zero())
        .map(|i| i + 1);
    ChainVerdict {
        chain: chain.clone(),
        found_by: Vec::new(),
        two_cycle,
        three_products,
        trivial_d,
        trivial_a,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyOutcome {
    pub family: SearchFamily,
    pub chains: usize,
    /// Set when the family could not run (for example a width bound).
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionReport {
    pub hypotheses: HypothesisCheck,
    pub families: Vec<FamilyOutcome>,
    pub chains: Vec<ChainVerdict>,
    /// Some chain meets one of the four conditions.
    pub trapdoor_found: bool,
    /// Hypotheses hold and no searched chain meets a condition.
    pub pass: bool,
    pub notes: Vec<String>,
}

/// Hypothesis checks plus chain searches over `families`. Families that
/// cannot run at this width are recorded as skipped.
pub fn check_exclusion_theorem(
    spec: &CipherSpec,
    variant: Variant,
    families: &[SearchFamily],
) -> Result<ExclusionReport> {
    let hypotheses = check_hypotheses(spec, variant)?;
    let mut outcomes = Vec::new();
    let mut found: BTreeMap<PartitionChain, Vec<SearchFamily>> = BTreeMap::new();
    for &family in families {
        match search_trapdoor_chains(spec, family) {
            Ok(chains) => {
                outcomes.push(FamilyOutcome {
                    family,
                    chains: chains.len(),
                    skipped: None,
                });
                for c in chains {
                    found.entry(c).or_default().push(family);
                }
            }
            Err(e @ (Error::SearchTooLarge(_) | Error::Parameter(_))) => {
                outcomes.push(FamilyOutcome {
                    family,
                    chains: 0,
                    skipped: Some(e.to_string()),
                })
            }
            Err(e) => return Err(e),
        }
    }
    let chains: Vec<ChainVerdict> = found
        .into_iter()
        .map(|(c, fams)| ChainVerdict {
            found_by: fams,
            ..chain_verdict(spec, &c)
        })
        .collect();
    let trapdoor_found = chains.iter().any(ChainVerdict::satisfies_any);
    let mut notes = vec!["searches cover the listed families only; an empty result is not a proof that no chain exists".to_string()];
    if hypotheses.rounds.iter().any(|r| r.normalized) {
        notes.push("some rounds do not fix 0 and were analysed in normalized form".into());
    }
    Ok(ExclusionReport {
        pass: hypotheses.holds && !trapdoor_found,
        hypotheses,
        families: outcomes,
        chains,
        trapdoor_found,
        notes,
    })
}

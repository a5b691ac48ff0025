//! Chain searches. Every chain is fixed by any one of its subgroups, so each
//! family enumerates anchor subgroups at some position and extends them in
//! both directions.
//!
//! * `Exhaustive`: every subgroup of `V×V` as `𝒰₁`; complete, `2n ≤ 8`.
//! * `Product`: anchors `A × D`. `A × D` survives a forward round only if
//!   `K(D) ≤ A` and a backward round only if `K(A) ≤ D`, where
//!   `K(X) = ⟨ρ(x + y) + ρ(x) + ρ(y) : x ∈ X, y ∈ V⟩` for normalized `ρ`.
//! * `Graph`: anchors `{(a, φ(a))}` after round `j` with `A` a subspace on
//!   which the normalized `ρ_j` is linear.
//! * `WallLifted`: lifts of wall propagations `L(U)ρ_j = L(W)` placed at
//!   rounds `j`, `j + 1`.

use super::chain::{chain_through, lift_partition, spn_image, PartitionChain};
use crate::error::{Error, Result};
use crate::f2lin::{enumerate_subspaces, Subspace, Word};
use crate::feistel::{CipherSpec, GeneratingFunction};
use crate::goursat::{pack, PairSubgroup};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// Largest `2n` for the exhaustive family.
pub const MAX_EXHAUSTIVE_WIDTH: u32 = 8;

/// Cap on graph-family anchors per round.
pub const MAX_GRAPH_ANCHORS: u64 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchFamily {
    Exhaustive,
    Product,
    Graph,
    WallLifted,
}

impl SearchFamily {
    pub const ALL: [SearchFamily; 4] = [
        SearchFamily::Exhaustive,
        SearchFamily::Product,
        SearchFamily::Graph,
        SearchFamily::WallLifted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SearchFamily::Exhaustive => "exhaustive",
            SearchFamily::Product => "product",
            SearchFamily::Graph => "graph",
            SearchFamily::WallLifted => "wall-lifted",
        }
    }
}

impl fmt::Display for SearchFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SearchFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SearchFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown search family '{s}'")))
    }
}

/// Runs one family and returns the distinct chains found, sorted.
pub fn search_trapdoor_chains(
    spec: &CipherSpec,
    family: SearchFamily,
) -> Result<Vec<PartitionChain>> {
    let chains = match family {
        SearchFamily::Exhaustive => exhaustive(spec)?,
        SearchFamily::Product => product(spec)?,
        SearchFamily::Graph => graph(spec)?,
        SearchFamily::WallLifted => wall_lifted(spec)?,
    };
    let set: BTreeSet<PartitionChain> = chains.into_iter().collect();
    Ok(set.into_iter().collect())
}

fn exhaustive(spec: &CipherSpec) -> Result<Vec<PartitionChain>> {
    let w = 2 * spec.n();
    if w > MAX_EXHAUSTIVE_WIDTH {
        return Err(Error::SearchTooLarge(format!(
            "exhaustive family needs 2n <= {MAX_EXHAUSTIVE_WIDTH}, got 2n = {w}"
        )));
    }
    let dims: Vec<u32> = (1..w).collect();
    let shards = crate::f2lin::subspace_shards(w, Some(&dims))?;
    let n = spec.n();
    Ok(crate::par::flat_map(&shards, |p| {
        p.subspaces()
            .filter_map(|s| chain_through(spec, 0, &PairSubgroup::new(n, s).expect("width 2n")))
            .collect()
    }))
}

/// `K(X)` for a normalized table.
fn k_space(rho: &[Word], n: u32, x: &Subspace) -> Subspace {
    let mut k = Subspace::zero(n);
    let elems: Vec<Word> = x.elements().collect();
    for y in 0..1u32 << n {
        for &d in &elems {
            k.insert(rho[(d ^ y) as usize] ^ rho[y as usize] ^ rho[d as usize]);
        }
        if k.is_full() {
            break;
        }
    }
    k
}

fn normalized_tables(spec: &CipherSpec) -> Vec<Vec<Word>> {
    spec.rounds()
        .iter()
        .map(|g| g.normalized().table().to_vec())
        .collect()
}

fn all_subspaces(n: u32) -> Result<Vec<Subspace>> {
    Ok(enumerate_subspaces(n, Some(&(0..=n).collect::<Vec<_>>()))?.collect())
}

fn product(spec: &CipherSpec) -> Result<Vec<PartitionChain>> {
    let n = spec.n();
    let r = spec.round_count();
    let subspaces = all_subspaces(n)?;
    let tables = normalized_tables(spec);
    // ks[i][j] = K_i(subspaces[j])
    let ks: Vec<Vec<Subspace>> = tables
        .iter()
        .map(|t| crate::par::map(&subspaces, |x| k_space(t, n, x)))
        .collect();
    let idx: Vec<usize> = (0..subspaces.len()).collect();
    let mut out = Vec::new();
    for pos in 0..=r {
        out.extend(crate::par::flat_map(&idx, |&di| {
            let d = &subspaces[di];
            let mut found = Vec::new();
            for (ai, a) in subspaces.iter().enumerate() {
                if (a.is_zero() && d.is_zero()) || (a.is_full() && d.is_full()) {
                    continue;
                }
                if pos < r && !ks[pos][di].is_subspace_of(a) {
                    continue;
                }
                if pos > 0 && !ks[pos - 1][ai].is_subspace_of(d) {
                    continue;
                }
                let anchor = PairSubgroup::product(a, d).expect("same width");
                if let Some(c) = chain_through(spec, pos, &anchor) {
                    found.push(c);
                }
            }
            found
        }));
    }
    Ok(out)
}

/// Subspaces of dimension at least 1 on which `f` (with `f(0) = 0`) is
/// linear, found by growing from lines.
pub fn linear_loci(f: &[Word], n: u32) -> Vec<Subspace> {
    let mut found: BTreeSet<Subspace> = BTreeSet::new();
    let mut layer: BTreeSet<Subspace> = (1..1u32 << n).map(|x| Subspace::span(n, [x])).collect();
    while !layer.is_empty() {
        let mut next = BTreeSet::new();
        for u in &layer {
            for x in u.coset_reps().skip(1) {
                let mut v = u.clone();
                v.insert(x);
                // new elements are x + u; additivity against each old one
                let fx = f[x as usize];
                if u.elements()
                    .all(|y| f[(x ^ y) as usize] == fx ^ f[y as usize])
                {
                    next.insert(v);
                }
            }
        }
        found.extend(layer);
        layer = next;
    }
    found.into_iter().collect()
}

fn graph(spec: &CipherSpec) -> Result<Vec<PartitionChain>> {
    let n = spec.n();
    let tables = normalized_tables(spec);
    let mut out = Vec::new();
    for (j, t) in tables.iter().enumerate() {
        let loci = linear_loci(t, n);
        let total: u64 = loci
            .iter()
            .filter(|a| a.dim() < n)
            .map(|a| 1u64 << (n * a.dim()))
            .sum();
        if total > MAX_GRAPH_ANCHORS {
            return Err(Error::SearchTooLarge(format!(
                "{total} graph anchors in round {}",
                j + 1
            )));
        }
        let anchors: Vec<PairSubgroup> = loci
            .iter()
            .filter(|a| a.dim() < n)
            .flat_map(|a| {
                let k = a.dim();
                let count = 1u64 << (n * k);
                (0..count).map(move |c| {
                    let words = a.basis().iter().enumerate().map(|(i, &b)| {
                        let img = ((c >> (i as u32 * n)) as Word) & crate::f2lin::mask(n);
                        pack(n, b, img)
                    });
                    PairSubgroup::span(n, words).expect("width 2n")
                })
            })
            .collect();
        out.extend(crate::par::flat_map(&anchors, |u| {
            chain_through(spec, j + 1, u).into_iter().collect()
        }));
    }
    Ok(out)
}

fn wall_lifted(spec: &CipherSpec) -> Result<Vec<PartitionChain>> {
    let layout = spec.layout();
    if layout.bricks() < 2 {
        return Err(Error::Parameter("walls require b ≥ 2".into()));
    }
    let mut out = Vec::new();
    for (j, g) in spec.rounds().iter().enumerate() {
        for wall in layout.walls() {
            let u = wall.subspace();
            if let Some(w) = spn_image(g, &u) {
                let (big1, _) = lift_partition(&u, &w, g)?;
                if let Some(c) = chain_through(spec, j, &big1) {
                    out.push(c);
                }
            }
        }
    }
    Ok(out)
}

/// Linear loci of every round, for reports.
pub fn round_loci(spec: &CipherSpec) -> Vec<Vec<Subspace>> {
    spec.rounds()
        .iter()
        .map(|g: &GeneratingFunction| linear_loci(g.normalized().table(), spec.n()))
        .collect()
}

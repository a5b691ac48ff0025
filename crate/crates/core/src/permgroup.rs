//! Small permutation groups: Schreier–Sims, orbits and block systems.
//!
//! Permutations act on the right: `x^g = g[x]` and `x^(gh) = h[g[x]]`.

use crate::error::{Error, Result};
use crate::feistel::{encryption_table, CipherSpec, RoundKeys};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const MAX_POINTS: usize = 4096;
pub const MAX_GENERATORS: usize = 1 << 16;
/// Largest `nr` for which every keyed encryption is used as a generator.
pub const MAX_FULL_KEY_BITS: u32 = 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PermWord(Vec<u32>);

impl PermWord {
    pub fn new(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        if n == 0 || n > MAX_POINTS {
            return Err(Error::GroupBounds(format!(
                "{n} points (limit {MAX_POINTS})"
            )));
        }
        let mut seen = vec![usize::MAX; n];
        for (i, &y) in images.iter().enumerate() {
            if y as usize >= n {
                return Err(Error::EntryOutOfRange {
                    index: i,
                    value: y,
                    width: n.trailing_zeros(),
                });
            }
            if seen[y as usize] != usize::MAX {
                return Err(Error::NotPermutation {
                    index: i,
                    value: y,
                    first: seen[y as usize],
                });
            }
            seen[y as usize] = i;
        }
        Ok(PermWord(images))
    }

    pub fn identity(points: usize) -> Self {
        PermWord((0..points as u32).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    /// `self` then `other`.
    pub fn then(&self, other: &PermWord) -> PermWord {
        PermWord(self.0.iter().map(|&y| other.0[y as usize]).collect())
    }

    pub fn inverse(&self) -> PermWord {
        let mut inv = vec![0; self.0.len()];
        for (i, &y) in self.0.iter().enumerate() {
            inv[y as usize] = i as u32;
        }
        PermWord(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &y)| i as u32 == y)
    }
}

fn check_generators(gens: &[PermWord]) -> Result<usize> {
    let Some(first) = gens.first() else {
        return Err(Error::GroupBounds("no generators".into()));
    };
    if gens.len() > MAX_GENERATORS {
        return Err(Error::GroupBounds(format!(
            "{} generators (limit {MAX_GENERATORS})",
            gens.len()
        )));
    }
    let n = first.degree();
    if let Some(g) = gens.iter().find(|g| g.degree() != n) {
        return Err(Error::GroupBounds(format!(
            "generators act on {n} and {} points",
            g.degree()
        )));
    }
    Ok(n)
}

/// Orbit of `point`, in discovery order.
pub fn orbit(gens: &[PermWord], point: u32) -> Result<Vec<u32>> {
    let n = check_generators(gens)?;
    if point as usize >= n {
        return Err(Error::Parameter(format!("point {point} outside 0..{n}")));
    }
    let mut seen = vec![false; n];
    seen[point as usize] = true;
    let mut out = vec![point];
    let mut i = 0;
    while i < out.len() {
        let x = out[i];
        for g in gens {
            let y = g.apply(x);
            if !std::mem::replace(&mut seen[y as usize], true) {
                out.push(y);
            }
        }
        i += 1;
    }
    Ok(out)
}

pub fn is_transitive(gens: &[PermWord]) -> Result<bool> {
    Ok(orbit(gens, 0)?.len() == gens[0].degree())
}

#[derive(Clone, Debug)]
struct Level {
    base: u32,
    /// Strong generators fixing every earlier base point.
    gens: Vec<PermWord>,
    orbit: Vec<u32>,
    /// `transversal[c]` maps the base point to `c`.
    transversal: Vec<Option<PermWord>>,
}

impl Level {
    fn new(base: u32, points: usize) -> Self {
        let mut transversal = vec![None; points];
        transversal[base as usize] = Some(PermWord::identity(points));
        Level {
            base,
            gens: Vec::new(),
            orbit: vec![base],
            transversal,
        }
    }

    fn rebuild_orbit(&mut self) {
        let points = self.transversal.len();
        self.transversal = vec![None; points];
        self.transversal[self.base as usize] = Some(PermWord::identity(points));
        self.orbit = vec![self.base];
        let mut i = 0;
        while i < self.orbit.len() {
            let x = self.orbit[i];
            let ux = self.transversal[x as usize]
                .clone()
                .expect("orbit point has a transversal");
            for g in &self.gens {
                let y = g.apply(x);
                if self.transversal[y as usize].is_none() {
                    self.transversal[y as usize] = Some(ux.then(g));
                    self.orbit.push(y);
                }
            }
            i += 1;
        }
    }
}

/// Base and strong generating set built by deterministic Schreier–Sims.
#[derive(Clone, Debug)]
pub struct StabilizerChain {
    points: usize,
    levels: Vec<Level>,
}

impl StabilizerChain {
    pub fn new(gens: &[PermWord]) -> Result<Self> {
        let points = check_generators(gens)?;
        let mut chain = StabilizerChain {
            points,
            levels: Vec::new(),
        };
        let gens: Vec<PermWord> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        for g in &gens {
            if chain.levels.iter().all(|l| g.apply(l.base) == l.base) {
                let moved = (0..points as u32)
                    .find(|&x| g.apply(x) != x)
                    .expect("non-identity");
                chain.levels.push(Level::new(moved, points));
            }
        }
        for i in 0..chain.levels.len() {
            let fixed: Vec<u32> = chain.levels[..i].iter().map(|l| l.base).collect();
            chain.levels[i].gens = gens
                .iter()
                .filter(|g| fixed.iter().all(|&b| g.apply(b) == b))
                .cloned()
                .collect();
            chain.levels[i].rebuild_orbit();
        }
        chain.complete();
        Ok(chain)
    }

    /// Sifts `g` from `start`; returns the residue and the level where it
    /// stopped (`levels.len()` when it passed every level).
    fn strip(&self, g: &PermWord, start: usize) -> (PermWord, usize) {
        let mut h = g.clone();
        for (j, level) in self.levels.iter().enumerate().skip(start) {
            let b = h.apply(level.base);
            match &level.transversal[b as usize] {
                Some(u) => h = h.then(&u.inverse()),
                None => return (h, j),
            }
        }
        (h, self.levels.len())
    }

    fn complete(&mut self) {
        let mut i = self.levels.len();
        while i > 0 {
            let level = i - 1;
            match self.find_missing(level) {
                Some((h, j)) => {
                    if j == self.levels.len() {
                        let moved = (0..self.points as u32)
                            .find(|&x| h.apply(x) != x)
                            .expect("non-identity");
                        self.levels.push(Level::new(moved, self.points));
                    }
                    for l in level + 1..=j {
                        self.levels[l].gens.push(h.clone());
                        self.levels[l].rebuild_orbit();
                    }
                    i = j + 1;
                }
                None => i -= 1,
            }
        }
    }

    /// First Schreier generator of `level` that does not sift through the
    /// levels below it.
    fn find_missing(&self, level: usize) -> Option<(PermWord, usize)> {
        let l = &self.levels[level];
        for &y in &l.orbit {
            let uy = l.transversal[y as usize].as_ref().expect("orbit point");
            for s in &l.gens {
                let ys = s.apply(y);
                let uys = l.transversal[ys as usize]
                    .as_ref()
                    .expect("orbit is closed");
                let h = uy.then(s).then(&uys.inverse());
                if h.is_identity() {
                    continue;
                }
                let (res, j) = self.strip(&h, level + 1);
                if j < self.levels.len() || !res.is_identity() {
                    return Some((res, j));
                }
            }
        }
        None
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::from(1u32), |acc, l| {
            acc * BigUint::from(l.orbit.len())
        })
    }

    pub fn contains(&self, g: &PermWord) -> bool {
        if g.degree() != self.points {
            return false;
        }
        let (res, j) = self.strip(g, 0);
        j == self.levels.len() && res.is_identity()
    }
}

pub fn group_order(gens: &[PermWord]) -> Result<BigUint> {
    Ok(StabilizerChain::new(gens)?.order())
}

pub fn membership(gens: &[PermWord], g: &PermWord) -> Result<bool> {
    Ok(StabilizerChain::new(gens)?.contains(g))
}

/// A partition of the points into blocks of equal size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSystem {
    /// Block index of each point; blocks numbered by first point.
    labels: Vec<u32>,
    blocks: Vec<Vec<u32>>,
}

impl BlockSystem {
    fn from_roots(roots: Vec<u32>) -> Self {
        let mut index = vec![u32::MAX; roots.len()];
        let mut blocks: Vec<Vec<u32>> = Vec::new();
        let labels = roots
            .iter()
            .enumerate()
            .map(|(x, &r)| {
                if index[r as usize] == u32::MAX {
                    index[r as usize] = blocks.len() as u32;
                    blocks.push(Vec::new());
                }
                let id = index[r as usize];
                blocks[id as usize].push(x as u32);
                id
            })
            .collect();
        BlockSystem { labels, blocks }
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn block_of(&self, x: u32) -> u32 {
        self.labels[x as usize]
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_size(&self) -> usize {
        self.labels.len() / self.blocks.len()
    }

    /// One block, or only singletons.
    pub fn is_trivial(&self) -> bool {
        self.blocks.len() == 1 || self.blocks.len() == self.labels.len()
    }

    pub fn is_invariant(&self, gens: &[PermWord]) -> bool {
        gens.iter().all(|g| {
            self.blocks.iter().all(|b| {
                let target = self.block_of(g.apply(b[0]));
                b.iter().all(|&x| self.block_of(g.apply(x)) == target)
            })
        })
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &BlockSystem) -> bool {
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&x| other.block_of(x) == other.block_of(b[0])))
    }

    pub fn from_labels(labels: &[u32]) -> Self {
        let mut first = std::collections::HashMap::new();
        let roots = labels
            .iter()
            .enumerate()
            .map(|(x, l)| *first.entry(*l).or_insert(x as u32))
            .collect();
        Self::from_roots(roots)
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        parent[x as usize] = parent[parent[x as usize] as usize];
        x = parent[x as usize];
    }
    x
}

/// Finest block system with `a` and `b` in one block.
pub fn minimal_blocks(gens: &[PermWord], a: u32, b: u32) -> Result<BlockSystem> {
    if !is_transitive(gens)? {
        return Err(Error::Intransitive);
    }
    let n = gens[0].degree();
    if a == b || a as usize >= n || b as usize >= n {
        return Err(Error::Parameter(format!(
            "need two distinct points in 0..{n}, got {a} and {b}"
        )));
    }
    let mut parent: Vec<u32> = (0..n as u32).collect();
    let mut queue = vec![(a, b)];
    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
    parent[rb as usize] = ra;
    while let Some((x, y)) = queue.pop() {
        for g in gens {
            let (p, q) = (find(&mut parent, g.apply(x)), find(&mut parent, g.apply(y)));
            if p != q {
                parent[q as usize] = p;
                queue.push((p, q));
            }
        }
    }
    let roots = (0..n as u32).map(|x| find(&mut parent, x)).collect();
    let system = BlockSystem::from_roots(roots);
    if !system.is_invariant(gens) {
        return Err(Error::Internal("block system is not invariant".into()));
    }
    Ok(system)
}

/// First non-trivial minimal block system over the pairs `{0, x}`.
pub fn is_imprimitive(gens: &[PermWord]) -> Result<Option<BlockSystem>> {
    if !is_transitive(gens)? {
        return Err(Error::Intransitive);
    }
    for x in 1..gens[0].degree() as u32 {
        let system = minimal_blocks(gens, 0, x)?;
        if !system.is_trivial() {
            return Ok(Some(system));
        }
    }
    Ok(None)
}

/// Every keyed encryption of `spec` as a permutation of `V×V`; needs
/// `nr ≤ 12`.
pub fn encryption_generators(spec: &CipherSpec) -> Result<Vec<PermWord>> {
    let bits = spec.n() * spec.round_count() as u32;
    if bits > MAX_FULL_KEY_BITS || 2 * spec.n() > 12 {
        return Err(Error::GroupBounds(format!(
            "{bits} key bits over {} points",
            1u64 << (2 * spec.n())
        )));
    }
    (0..1u64 << bits)
        .map(|i| {
            let keys = RoundKeys::nth(spec.n(), spec.round_count(), i);
            PermWord::new(encryption_table(spec, &keys)?)
        })
        .collect()
}

/// `count` encryptions under seeded random keys. The generated group is a
/// subgroup of the one generated by all encryptions.
pub fn sampled_encryption_generators(
    spec: &CipherSpec,
    count: usize,
    seed: u64,
) -> Result<Vec<PermWord>> {
    if 2 * spec.n() > 12 {
        return Err(Error::GroupBounds(format!(
            "{} points",
            1u64 << (2 * spec.n())
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let keys = RoundKeys::random(spec.n(), spec.round_count(), &mut rng);
            PermWord::new(encryption_table(spec, &keys)?)
        })
        .collect()
}

/// Translation `x ↦ x + v` on `2^w` points.
pub fn translation(w: u32, v: u32) -> PermWord {
    PermWord((0..1u32 << w).map(|x| x ^ v).collect())
}

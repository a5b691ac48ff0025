//! Seeded demo ciphers: one carrying a wall chain and one meant to pass the
//! hypothesis checks.

use super::chain::{lift_partition, propagate_chain, verify_chain, PartitionChain, Propagation};
use crate::difflayer::check_properness;
use crate::error::{Error, Result};
use crate::f2lin::{BrickLayout, LinearMap, Wall};
use crate::feistel::{CipherSpec, GeneratingFunction, KeyMode};
use crate::goursat::PairSubgroup;
use crate::sboxprops::catalog::{cube_sbox, random_linear_equivalent, random_sbox};
use crate::sboxprops::{ParallelSBox, SBox};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_boxes(layout: BrickLayout, apn: bool, rng: &mut ChaCha8Rng) -> Result<ParallelSBox> {
    let s = layout.brick_width();
    let cube = if apn { Some(cube_sbox(s)?) } else { None };
    let boxes: Vec<SBox> = (0..layout.bricks())
        .map(|_| match &cube {
            Some(c) => random_linear_equivalent(c, rng).normalized(),
            None => random_sbox(s, rng).normalized(),
        })
        .collect();
    ParallelSBox::new(layout, boxes)
}

/// Walls of the odd-indexed and the even-indexed bricks (1-based), which the
/// `b`-cycle swaps.
pub fn weak_walls(layout: BrickLayout) -> Result<(Wall, Wall)> {
    let b = layout.bricks();
    let odd = (0..b).step_by(2).fold(0, |m, j| m | 1 << j);
    let even = (1..b).step_by(2).fold(0, |m, j| m | 1 << j);
    Ok((Wall::new(layout, odd)?, Wall::new(layout, even)?))
}

/// Random parallel S-boxes followed by the brick cycle `j ↦ j + 1`. Returns
/// the spec and its verified chain `E×O, O×E, E×O, …` where `O`, `E` are the
/// odd and even walls. With `apn` the boxes are linear equivalents of the
/// cube map (odd `s` only).
pub fn build_weak_cipher(
    s: u32,
    b: u32,
    r: usize,
    seed: u64,
    apn: bool,
) -> Result<(CipherSpec, PartitionChain)> {
    if b < 2 {
        return Err(Error::Parameter("walls require b ≥ 2".into()));
    }
    if !b.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "the wall chain needs an even brick count, got b = {b}"
        )));
    }
    if s < 3 {
        return Err(Error::Parameter(format!(
            "brick width must be at least 3, got s = {s}"
        )));
    }
    if r < 2 {
        return Err(Error::Parameter(format!(
            "at least two rounds are needed, got r = {r}"
        )));
    }
    if apn && s.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "the cube map is not APN for even s = {s}"
        )));
    }
    let layout = BrickLayout::new(s, b)?;
    if 2 * layout.width() > 32 {
        return Err(Error::WidthOutOfRange(2 * layout.width()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cycle: Vec<u32> = (0..b).map(|j| (j + 1) % b).collect();
    let lambda = LinearMap::brick_permutation(s, &cycle)?;
    let rounds = (0..r)
        .map(|_| GeneratingFunction::composed(random_boxes(layout, apn, &mut rng)?, lambda.clone()))
        .collect::<Result<Vec<_>>>()?;
    let spec = CipherSpec::new(layout, rounds, KeyMode::After)?;
    let (odd, even) = weak_walls(layout)?;
    let (o, e) = (odd.subspace(), even.subspace());
    let first = if 2 * layout.width() <= 16 {
        lift_partition(&o, &e, &spec.rounds()[0])?.0
    } else {
        PairSubgroup::product(&e, &o)?
    };
    let mut chain = match propagate_chain(&spec, &first)? {
        Propagation::Complete(c) => c,
        Propagation::Failed { round, .. } => return Err(Error::ChainNotVerified(round)),
    };
    let expected: Vec<PairSubgroup> = (0..=r)
        .map(|i| {
            if i % 2 == 0 {
                PairSubgroup::product(&e, &o)
            } else {
                PairSubgroup::product(&o, &e)
            }
        })
        .collect::<Result<_>>()?;
    if chain.subgroups() != expected.as_slice() {
        return Err(Error::Internal(
            "weak cipher chain is not the alternating wall chain".into(),
        ));
    }
    verify_chain(&spec, &mut chain)?;
    Ok((spec, chain))
}

/// `s = 3`, `b = 2`, `r = 4`, cube-equivalent boxes and random strongly
/// proper diffusion layers.
pub fn build_strong_cipher(seed: u64) -> Result<CipherSpec> {
    let layout = BrickLayout::new(3, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rounds = Vec::with_capacity(4);
    for _ in 0..4 {
        let gamma = random_boxes(layout, true, &mut rng)?;
        let lambda = loop {
            let l = LinearMap::random_invertible(layout.width(), &mut rng);
            if check_properness(&l, layout)?.strongly_proper {
                break l;
            }
        };
        rounds.push(GeneratingFunction::composed(gamma, lambda)?);
    }
    CipherSpec::new(layout, rounds, KeyMode::After)
}

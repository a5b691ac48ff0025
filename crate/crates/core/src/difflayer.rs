//! Wall tests for linear diffusion layers.

use crate::error::{Error, Result};
use crate::f2lin::{as_wall, BrickLayout, LinearMap, Subspace, Wall};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffusionReport {
    /// No wall is mapped onto itself.
    pub proper: bool,
    /// No wall is mapped onto any wall.
    pub strongly_proper: bool,
    pub witness_invariant_wall: Option<Wall>,
    pub witness_wall_pair: Option<(Wall, Wall)>,
}

/// Image of `u` under `lambda`.
pub fn image_of_subspace(lambda: &LinearMap, u: &Subspace) -> Result<Subspace> {
    if u.width() != lambda.width() {
        return Err(Error::WidthMismatch {
            expected: lambda.width(),
            found: u.width(),
        });
    }
    Ok(Subspace::span(
        u.width(),
        u.basis().iter().map(|&w| lambda.apply(w)),
    ))
}

/// Scans all `2^b - 2` walls. Witnesses are the first failures by member mask.
pub fn check_properness(lambda: &LinearMap, layout: BrickLayout) -> Result<DiffusionReport> {
    if lambda.width() != layout.width() {
        return Err(Error::WidthMismatch {
            expected: layout.width(),
            found: lambda.width(),
        });
    }
    if !lambda.is_invertible() {
        return Err(Error::Singular);
    }
    let mut invariant = None;
    let mut pair = None;
    for w in layout.walls() {
        let img = image_of_subspace(lambda, &w.subspace())?;
        if let Some(members) = as_wall(layout, &img) {
            if pair.is_none() {
                pair = Some((w, Wall::new(layout, members)?));
            }
            if invariant.is_none() && members == w.members() {
                invariant = Some(w);
            }
        }
    }
    Ok(DiffusionReport {
        proper: invariant.is_none(),
        strongly_proper: pair.is_none(),
        witness_invariant_wall: invariant,
        witness_wall_pair: pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn layout() -> BrickLayout {
        BrickLayout::new(3, 2).unwrap()
    }

    #[test]
    fn identity_is_not_proper() {
        let r = check_properness(&LinearMap::identity(6), layout()).unwrap();
        assert!(!r.proper && !r.strongly_proper);
        assert_eq!(r.witness_invariant_wall.unwrap().members(), 0b01);
    }

    #[test]
    fn brick_swap_is_proper_only() {
        let swap = LinearMap::brick_permutation(3, &[1, 0]).unwrap();
        let r = check_properness(&swap, layout()).unwrap();
        assert!(r.proper);
        assert!(!r.strongly_proper);
        let (a, b) = r.witness_wall_pair.unwrap();
        assert_eq!((a.members(), b.members()), (0b01, 0b10));
        assert!(r.witness_invariant_wall.is_none());
    }

    #[test]
    fn mixing_map_is_strongly_proper() {
        // e1 -> e1+e4, e4 -> e1, everything else fixed
        let mut rows: Vec<u32> = (0..6).map(|i| 1 << i).collect();
        rows[0] = 0b001_001;
        rows[3] = 0b000_001;
        let m = LinearMap::new(6, rows).unwrap();
        assert!(m.is_invertible());
        let v1 = image_of_subspace(&m, &layout().walls().next().unwrap().subspace()).unwrap();
        assert_eq!(as_wall(layout(), &v1), None);
        let r = check_properness(&m, layout()).unwrap();
        assert!(r.proper && r.strongly_proper);
        assert_eq!(r.witness_wall_pair, None);
    }

    #[test]
    fn singular_rejected() {
        let m = LinearMap::new(6, vec![1, 1, 4, 8, 16, 32]).unwrap();
        assert_eq!(check_properness(&m, layout()), Err(Error::Singular));
    }

    #[test]
    fn image_trivial_cases() {
        let u = Subspace::span(6, [0b101, 0b110_000]);
        assert_eq!(image_of_subspace(&LinearMap::identity(6), &u).unwrap(), u);
        let z = Subspace::zero(6);
        let m = LinearMap::brick_permutation(3, &[1, 0]).unwrap();
        assert_eq!(image_of_subspace(&m, &z).unwrap(), z);
    }

    proptest! {
        #[test]
        fn invertible_preserves_dim_and_inverse_agrees(seed in any::<u64>(), gens in prop::collection::vec(0u32..64, 0..6)) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m = LinearMap::random_invertible(6, &mut rng);
            let u = Subspace::span(6, gens);
            prop_assert_eq!(image_of_subspace(&m, &u).unwrap().dim(), u.dim());
            let a = check_properness(&m, layout()).unwrap();
            let b = check_properness(&m.inverse().unwrap(), layout()).unwrap();
            prop_assert_eq!(a.strongly_proper, b.strongly_proper);
            prop_assert_eq!(a.proper, b.proper);
        }
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

use super::newton::NewtonPolyhedron;
use super::polytope::RationalPolytope;

/// Largest coordinate used by the random generators.
pub const RANDOM_COORD_MAX: i64 = 6;

/// Independent deterministic stream `index` of the run seeded by `seed`.
pub fn campaign_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A full-dimensional lattice polytope: the hull of 4 to 8 random points of
/// `{0..6}^N`, resampled until it has positive volume.
pub fn random_body<R: Rng>(rng: &mut R, dim: usize) -> Result<RationalPolytope> {
    loop {
        let count = rng.gen_range(4..=8);
        let pts: Vec<Vec<i64>> = (0..count)
            .map(|_| (0..dim).map(|_| rng.gen_range(0..=RANDOM_COORD_MAX)).collect())
            .collect();
        let p = RationalPolytope::from_integers(dim, &pts)?;
        if p.is_full_dimensional() {
            return Ok(p);
        }
    }
}

/// A convenient Newton polyhedron: one axis intercept in `1..=6` per axis
/// plus up to three random points of `{0..6}^N`.
pub fn random_newton<R: Rng>(rng: &mut R, dim: usize) -> Result<NewtonPolyhedron> {
    let mut gens = Vec::new();
    for axis in 0..dim {
        let m = rng.gen_range(1..=RANDOM_COORD_MAX);
        gens.push((0..dim).map(|j| if j == axis { m } else { 0 }).collect());
    }
    for _ in 0..rng.gen_range(0..=3) {
        gens.push((0..dim).map(|_| rng.gen_range(0..=RANDOM_COORD_MAX)).collect());
    }
    // A random zero vector would make the polyhedron the whole orthant.
    gens.retain(|g: &Vec<i64>| g.iter().any(|&c| c > 0));
    NewtonPolyhedron::new(dim, gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = random_body(&mut campaign_rng(7, 3), 3).unwrap();
        let b = random_body(&mut campaign_rng(7, 3), 3).unwrap();
        assert_eq!(a, b);
        let gens: Vec<_> = (0..8).map(|i| random_newton(&mut campaign_rng(7, i), 2).unwrap()).collect();
        assert!(gens.iter().any(|g| *g != gens[0]));
        for g in &gens {
            assert!(g.covolume().unwrap() > num_traits::Zero::zero());
        }
    }
}

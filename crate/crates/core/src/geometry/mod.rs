//! Exact convex geometry in dimensions 1 to 3: lattice and rational
//! polytopes, convenient Newton polyhedra, mixed volumes and covolumes.

mod hull;
mod mixed;
mod newton;
mod polytope;
mod random;

pub use mixed::{
    mixed_covolumes, mixed_volumes, multilinearity_check, multilinearity_check_covolume,
    polarization_mixed_covolume, polarization_mixed_volume, verify_af, verify_teissier, AbstractTable,
    MixedVolumeTable, MultilinearityReport, QuadraticReport, TableKind,
};
pub use newton::{weighted_newton_sum, NewtonPolyhedron};
pub use polytope::{minkowski_sum, volume, weighted_sum, Point, RationalPolytope};
pub use random::{campaign_rng, random_body, random_newton, RANDOM_COORD_MAX};

use crate::error::{Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 3;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::Domain(format!("dimension {dim} outside 1..={MAX_DIM}")))
    }
}

pub(crate) fn factorial_i(n: usize) -> i128 {
    (1..=n as i128).product()
}

/// Non-empty subsets of `0..n` as sorted index lists.
pub(crate) fn subsets_nonempty(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..1 << n).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
}

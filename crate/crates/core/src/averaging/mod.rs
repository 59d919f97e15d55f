//! Exact averaging over `K(n, r)`: lattice functions, symmetrization,
//! correlation gaps, invariant up-sets and the strata bookkeeping used to
//! verify the averaging inequality.
//!
//! Everything here is exact rational arithmetic except geometric averages,
//! whose logarithms are certified intervals (see [`crate::interval`]).

mod fkg;
mod strata;
mod upset;

pub use fkg::{
    correlate, fkg_homogeneous_pair, verify_fkg, verify_fkg_exhaustive, verify_geometric_corollary,
    verify_homogeneous_pair, verify_pushforward_corollary, CorrelationReport, Direction,
    raw_gap, ExhaustiveReport, FkgReport, GeometricReport,
    GeometricStatus, HomogeneousReport, PairWitness,
};
pub(crate) use fkg::{classify_log_gap, log_gap_certified};
pub use strata::{
    alpha_coefficients, alpha_coefficients_from_counts, alpha_tail_closed_form, chebyshev_weighted,
    decomposition_counts, strata_recursion_check, strata_averages, verify_alpha_identities,
    verify_strata_exhaustive, AlphaIdentities, ChebyshevReport, DecompositionCounts, StrataRecursionCheck, StrataExhaustiveReport, StrataProfile,
};
pub use upset::{enumerate_filters, UpSet, DEFAULT_FILTER_CAP};

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{exact_root, Rational};
use crate::error::{Error, Result};
use crate::interval::{self, Interval};
use crate::lattice::{Composition, CompositionLattice};

/// Monotonicity of a function with respect to the dominance order, detected
/// on cover relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monotonicity {
    Constant,
    NonDecreasing,
    NonIncreasing,
    Neither,
}

impl Monotonicity {
    /// Sign contributed to a correlation gap: `+1`, `-1`, `0` for constants.
    pub fn sign(self) -> Option<i8> {
        match self {
            Monotonicity::Constant => Some(0),
            Monotonicity::NonDecreasing => Some(1),
            Monotonicity::NonIncreasing => Some(-1),
            Monotonicity::Neither => None,
        }
    }
}

/// A non-negative exact function on the elements of a lattice.
#[derive(Clone, Debug)]
pub struct LatticeFunction {
    lattice: Arc<CompositionLattice>,
    values: Vec<Rational>,
}

impl LatticeFunction {
    pub fn new(lattice: Arc<CompositionLattice>, values: Vec<Rational>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::Domain(format!(
                "function has {} values, lattice has {} elements",
                values.len(),
                lattice.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| v.is_negative()) {
            return Err(Error::Domain(format!(
                "negative value {} at {}",
                values[i],
                lattice.element(i)
            )));
        }
        Ok(Self { lattice, values })
    }

    pub fn from_fn(
        lattice: Arc<CompositionLattice>,
        mut f: impl FnMut(&Composition) -> Rational,
    ) -> Result<Self> {
        let values = lattice.elements().iter().map(&mut f).collect();
        Self::new(lattice, values)
    }

    pub fn constant(lattice: Arc<CompositionLattice>, c: Rational) -> Result<Self> {
        let values = vec![c; lattice.len()];
        Self::new(lattice, values)
    }

    pub fn indicator(lattice: Arc<CompositionLattice>, member: impl Fn(&Composition) -> bool) -> Self {
        let values = lattice
            .elements()
            .iter()
            .map(|c| if member(c) { Rational::one() } else { Rational::zero() })
            .collect();
        Self { lattice, values }
    }

    pub fn lattice(&self) -> &Arc<CompositionLattice> {
        &self.lattice
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value_at(&self, i: usize) -> &Rational {
        &self.values[i]
    }

    pub fn value(&self, c: &Composition) -> Result<&Rational> {
        Ok(&self.values[self.lattice.index_of(c)?])
    }

    fn check_same_lattice(&self, other: &LatticeFunction) -> Result<()> {
        if self.lattice.n() != other.lattice.n() || self.lattice.r() != other.lattice.r() {
            return Err(Error::Domain(format!(
                "functions live on K({},{}) and K({},{})",
                self.lattice.n(),
                self.lattice.r(),
                other.lattice.n(),
                other.lattice.r()
            )));
        }
        Ok(())
    }

    /// Arithmetic average over all elements.
    pub fn average(&self) -> Rational {
        let sum: Rational = self.values.iter().sum();
        sum / Rational::from_integer(BigInt::from(self.values.len()))
    }

    pub fn product(&self, other: &LatticeFunction) -> Result<LatticeFunction> {
        self.check_same_lattice(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self { lattice: self.lattice.clone(), values })
    }

    /// `a·self + b·other` for `a, b >= 0`.
    pub fn combine(&self, a: &Rational, other: &LatticeFunction, b: &Rational) -> Result<LatticeFunction> {
        self.check_same_lattice(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Self::new(self.lattice.clone(), values)
    }

    pub fn max_value(&self) -> Rational {
        self.values.iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    /// `max(f) - f`.
    pub fn reflect(&self) -> LatticeFunction {
        let m = self.max_value();
        let values = self.values.iter().map(|v| &m - v).collect();
        Self { lattice: self.lattice.clone(), values }
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    /// A pair `(a, σa)` on which the function differs, if any.
    pub fn invariance_witness(&self) -> Option<(Composition, Composition)> {
        for orbit in self.lattice.orbits() {
            let first = orbit[0];
            if let Some(&j) = orbit.iter().find(|&&j| self.values[j] != self.values[first]) {
                return Some((self.lattice.element(first).clone(), self.lattice.element(j).clone()));
            }
        }
        None
    }

    pub fn is_invariant(&self) -> bool {
        self.invariance_witness().is_none()
    }

    /// A cover `(upper, lower)` violating the requested direction.
    pub fn monotonicity_witness(&self, increasing: bool) -> Option<(Composition, Composition)> {
        self.lattice.covers().iter().find_map(|&(u, l)| {
            let bad = if increasing {
                self.values[u] < self.values[l]
            } else {
                self.values[u] > self.values[l]
            };
            bad.then(|| (self.lattice.element(u).clone(), self.lattice.element(l).clone()))
        })
    }

    pub fn monotonicity(&self) -> Monotonicity {
        if self.is_constant() {
            return Monotonicity::Constant;
        }
        match (
            self.monotonicity_witness(true).is_none(),
            self.monotonicity_witness(false).is_none(),
        ) {
            (true, _) => Monotonicity::NonDecreasing,
            (false, true) => Monotonicity::NonIncreasing,
            (false, false) => Monotonicity::Neither,
        }
    }

    /// Orbit average `x ↦ Av over Ξ_r(x) of g`.
    pub fn symmetrize(&self) -> LatticeFunction {
        let mut values = self.values.clone();
        for orbit in self.lattice.orbits() {
            let sum: Rational = orbit.iter().map(|&i| self.values[i].clone()).sum();
            let avg = sum / Rational::from_integer(BigInt::from(orbit.len()));
            for &i in orbit {
                values[i] = avg.clone();
            }
        }
        Self { lattice: self.lattice.clone(), values }
    }

    /// Writes an invariant non-decreasing function as
    /// `Σ c_i · 1_{X_i}` with `c_i >= 0` and invariant up-sets `X_i`
    /// (level sets `{f >= v}`).
    pub fn level_set_decomposition(&self) -> Result<Vec<(Rational, UpSet)>> {
        if let Some((a, b)) = self.invariance_witness() {
            return Err(Error::Precondition(format!("not invariant: f{a} != f{b}")));
        }
        if let Some((u, l)) = self.monotonicity_witness(true) {
            return Err(Error::Precondition(format!("not non-decreasing on cover {u} ⋗ {l}")));
        }
        let levels: BTreeSet<&Rational> = self.values.iter().collect();
        let mut out = Vec::new();
        let mut prev = Rational::zero();
        for v in levels {
            let coeff = v - &prev;
            let members = self.values.iter().map(|x| x >= v).collect::<Vec<_>>();
            let set = UpSet::from_predicate(self.lattice.clone(), |i| members[i])?;
            if !coeff.is_zero() {
                out.push((coeff, set));
            }
            prev = v.clone();
        }
        Ok(out)
    }

    /// Certified enclosure of `Av(ln f)`; all values must be positive.
    pub fn log_average(&self, prec: u32) -> Result<Interval> {
        let w = Rational::new(BigInt::one(), BigInt::from(self.values.len()));
        let terms: Vec<(Rational, Rational)> = self.values.iter().map(|v| (w.clone(), v.clone())).collect();
        interval::weighted_log_sum(&terms, prec)
    }

    /// Geometric average `(∏ f)^(1/|K|)`.
    pub fn geometric_average(&self) -> Result<GeometricAverage> {
        if let Some(i) = self.values.iter().position(|v| !v.is_positive()) {
            return Err(Error::Domain(format!(
                "geometric average needs positive values; f{} = {}",
                self.lattice.element(i),
                self.values[i]
            )));
        }
        let product: Rational = self.values.iter().product();
        let k = self.values.len() as u32;
        match exact_root(&product, k) {
            Some(root) => Ok(GeometricAverage::Exact(root)),
            None => Ok(GeometricAverage::Irrational {
                log: self.log_average(interval::START_PRECISION)?,
            }),
        }
    }
}

/// Geometric average: an exact rational when the product is a perfect
/// power, otherwise a certified enclosure of its logarithm.
#[derive(Clone, Debug, PartialEq)]
pub enum GeometricAverage {
    Exact(Rational),
    Irrational { log: Interval },
}

impl GeometricAverage {
    pub fn log(&self, prec: u32) -> Result<Interval> {
        match self {
            GeometricAverage::Exact(v) => interval::ln(v, prec),
            GeometricAverage::Irrational { log } => Ok(log.clone()),
        }
    }
}

/// `Av(fg) - Av(f)·Av(g)`, the correlation gap, exactly. No hypotheses.
pub fn gap(f: &LatticeFunction, g: &LatticeFunction) -> Result<Rational> {
    Ok(f.product(g)?.average() - f.average() * g.average())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn lat(n: u32, r: usize) -> Arc<CompositionLattice> {
        Arc::new(CompositionLattice::new(n, r).unwrap())
    }

    #[test]
    fn averages() {
        let l = lat(6, 3);
        let c = LatticeFunction::constant(l.clone(), rat(5, 2)).unwrap();
        assert_eq!(c.average(), rat(5, 2));
        let ind = LatticeFunction::indicator(l.clone(), |k| k.zero_count() == 0);
        assert_eq!(ind.average(), rat(10, 28));
        let ones = LatticeFunction::from_fn(l, |k| {
            k.parts().iter().map(|&p| crate::arith::pow(&int(1), p as i64)).product()
        })
        .unwrap();
        assert_eq!(ones.average(), int(1));
    }

    #[test]
    fn rejects_negative_and_length() {
        let l = lat(2, 2);
        assert!(LatticeFunction::new(l.clone(), vec![int(1), int(-1), int(0)]).is_err());
        assert!(LatticeFunction::new(l, vec![int(1)]).is_err());
    }

    #[test]
    fn geometric_average_examples() {
        let l = lat(2, 2);
        let c = LatticeFunction::constant(l.clone(), int(7)).unwrap();
        assert_eq!(c.geometric_average().unwrap(), GeometricAverage::Exact(int(7)));
        let f = LatticeFunction::new(l.clone(), vec![int(1), int(2), int(4)]).unwrap();
        assert_eq!(f.geometric_average().unwrap(), GeometricAverage::Exact(int(2)));
        let z = LatticeFunction::new(l, vec![int(1), int(0), int(4)]).unwrap();
        assert!(z.geometric_average().is_err());
    }

    #[test]
    fn log_of_geometric_average_is_average_log() {
        let l = lat(3, 2);
        let f = LatticeFunction::new(l, vec![int(3), int(5), int(7), int(11)]).unwrap();
        let ga = f.geometric_average().unwrap();
        assert!(matches!(ga, GeometricAverage::Irrational { .. }));
        let direct = f.log_average(80).unwrap();
        assert!(ga.log(80).unwrap().overlaps(&direct));
        let expected = (3f64 * 5. * 7. * 11.).ln() / 4.;
        assert!((direct.midpoint_f64() - expected).abs() < 1e-12);
    }

    #[test]
    fn symmetrize_examples() {
        let l = lat(2, 2);
        let g = LatticeFunction::indicator(l.clone(), |k| k.parts() == [2, 0]);
        let s = g.symmetrize();
        assert_eq!(s.values(), &[rat(1, 2), int(0), rat(1, 2)]);
        assert!(s.is_invariant());
        let inv = LatticeFunction::indicator(l, |k| k.zero_count() == 1);
        assert_eq!(inv.symmetrize().values(), inv.values());
    }

    #[test]
    fn monotonicity_detection() {
        let l = lat(4, 3);
        let sq = LatticeFunction::from_fn(l.clone(), |k| int(k.sum_of_squares() as i64)).unwrap();
        assert_eq!(sq.monotonicity(), Monotonicity::NonDecreasing);
        assert_eq!(sq.reflect().monotonicity(), Monotonicity::NonIncreasing);
        let c = LatticeFunction::constant(l.clone(), int(3)).unwrap();
        assert_eq!(c.monotonicity(), Monotonicity::Constant);
        let odd = LatticeFunction::indicator(l, |k| k.parts()[0] == 2);
        assert_eq!(odd.monotonicity(), Monotonicity::Neither);
    }

    #[test]
    fn level_sets_round_trip() {
        let l = lat(5, 3);
        let f = LatticeFunction::from_fn(l.clone(), |k| {
            int(k.sum_of_squares() as i64) / int(3) + int(k.zero_count() as i64)
        })
        .unwrap();
        let parts = f.level_set_decomposition().unwrap();
        let mut rebuilt = vec![Rational::zero(); l.len()];
        for (c, set) in &parts {
            assert!(c.is_positive());
            for (i, v) in rebuilt.iter_mut().enumerate() {
                if set.contains(i) {
                    *v += c;
                }
            }
        }
        assert_eq!(rebuilt, f.values());
    }
}

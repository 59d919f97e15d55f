use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{rat_from_biguint, serde_rational, shifted_multinomial, Rational};
use crate::averaging::{correlate, CorrelationReport, LatticeFunction};
use crate::error::{Error, Result};
use crate::geometry::{
    campaign_rng, mixed_covolumes, mixed_volumes, random_body, MixedVolumeTable, NewtonPolyhedron, QuadraticReport,
    RationalPolytope, TableKind,
};
use crate::lattice::CompositionLattice;

#[derive(Clone, Debug, Serialize)]
pub struct ProductReport {
    /// `Vol(A_1,A_2,A_3)^6`.
    #[serde(with = "serde_rational")]
    pub lhs: Rational,
    /// `∏_{i≠j} V(A_i,A_i,A_j)`.
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
    pub holds: bool,
    pub equality: bool,
    /// The Alexandrov-Fenchel inequalities of the embeddings
    /// `(k1,k2,1)`, `(1,k1,k2)`, `(k1,1,k2)`.
    pub factors: Vec<QuadraticReport>,
    /// Both sides equal the products of the factor sides.
    pub factorization_matches: bool,
}

impl ProductReport {
    pub fn passed(&self) -> bool {
        self.holds && self.factorization_matches && self.factors.iter().all(|f| f.holds)
    }
}

/// `Vol(A_1,A_2,A_3)^6 >= ∏_{i≠j} V(A_i,A_i,A_j)` for three bodies in `R^3`.
pub fn verify_product_inequality(bodies: &[RationalPolytope]) -> Result<ProductReport> {
    if bodies.len() != 3 || bodies.iter().any(|b| b.dim() != 3) {
        return Err(Error::Domain("the product inequality needs three bodies in R^3".into()));
    }
    let table = mixed_volumes(bodies)?;
    let v = |k: [u32; 3]| table.get(&k).expect("own key").clone();
    let mid = v([1, 1, 1]);
    let pair = |i: usize, j: usize| {
        let mut k = [0u32; 3];
        k[i] = 2;
        k[j] = 1;
        v(k)
    };
    let lhs = num_traits::pow(mid.clone(), 6);
    let mut rhs = Rational::one();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                rhs *= pair(i, j);
            }
        }
    }
    // Varying pair (i, j) with the third body fixed at exponent 1.
    let factors: Vec<QuadraticReport> = [(0, 1, 2), (1, 2, 0), (0, 2, 1)]
        .iter()
        .map(|&(i, j, fixed)| {
            let l = &mid * &mid;
            let r = pair(i, fixed) * pair(j, fixed);
            QuadraticReport { dim: 3, holds: l >= r, equality: l == r, lhs: l, rhs: r }
        })
        .collect();
    let flhs: Rational = factors.iter().map(|f| f.lhs.clone()).product();
    let frhs: Rational = factors.iter().map(|f| f.rhs.clone()).product();
    Ok(ProductReport {
        holds: lhs >= rhs,
        equality: lhs == rhs,
        factorization_matches: flhs == lhs && frhs == rhs,
        lhs,
        rhs,
        factors,
    })
}

/// `C(k) = (n + r)! / ∏ (k_i + 1)!` on `K(n, r)`.
pub fn durfee_multinomial(lattice: Arc<CompositionLattice>) -> Result<LatticeFunction> {
    LatticeFunction::from_fn(lattice, |k| rat_from_biguint(shifted_multinomial(k.parts())))
}

#[derive(Clone, Debug, Serialize)]
pub struct DurfeeReport {
    pub n: u32,
    pub r: usize,
    /// Ambient dimension `n + r`.
    pub dim: u32,
    /// `Σ_k C(k)`.
    #[serde(with = "serde_rational")]
    pub sum_c: Rational,
    /// `Σ_k coVol(Γ^{k+1})`.
    #[serde(with = "serde_rational")]
    pub sum_covol: Rational,
    /// `Σ_k C(k)·coVol(Γ^{k+1})`.
    #[serde(with = "serde_rational")]
    pub weighted_sum: Rational,
    /// `binom(n + r - 1, n) = |K(n, r)|`.
    pub lattice_size: usize,
    #[serde(with = "serde_rational")]
    pub lhs: Rational,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
    pub holds: bool,
    pub equality: bool,
    /// `lhs - rhs = -|K|^2 · gap(C, coVol)`.
    pub identity_holds: bool,
    pub correlation: CorrelationReport,
    /// Whether all polyhedra coincide; `None` for tables.
    pub inputs_equal: Option<bool>,
    pub c_constant: bool,
    /// Equality coincides with "all polyhedra equal".
    pub equal_iff_inputs_equal: Option<bool>,
}

impl DurfeeReport {
    pub fn passed(&self) -> bool {
        self.holds && self.identity_holds && self.correlation.passed()
    }
}

/// `(Σ C)(Σ coVol) >= binom(n+r-1, n)·Σ C·coVol` over `K(n, r)` with
/// `coVol(k) = coVol_{n+r}(Γ_1^{k_1+1}, …, Γ_r^{k_r+1})`.
pub fn verify_durfee_inequality(polys: &[NewtonPolyhedron]) -> Result<DurfeeReport> {
    let table = mixed_covolumes(polys)?;
    let equal = polys.windows(2).all(|w| w[0] == w[1]);
    durfee_from_table(&table, Some(equal))
}

/// The same inequality with a covolume table standing in for the geometry.
pub fn verify_durfee_table(table: &MixedVolumeTable) -> Result<DurfeeReport> {
    if table.kind() != TableKind::Covolume {
        return Err(Error::Domain("expected a covolume table".into()));
    }
    durfee_from_table(table, None)
}

fn durfee_from_table(table: &MixedVolumeTable, inputs_equal: Option<bool>) -> Result<DurfeeReport> {
    let dim = table.dim() as u32;
    let r = table.r();
    if r as u32 > dim {
        return Err(Error::Domain(format!("need r <= n + r; got r = {r} in dimension {dim}")));
    }
    let n = dim - r as u32;
    let lattice = Arc::new(CompositionLattice::new(n, r)?);
    let c = durfee_multinomial(lattice.clone())?;
    let covol = LatticeFunction::from_fn(lattice.clone(), |k| {
        let shifted: Vec<u32> = k.parts().iter().map(|p| p + 1).collect();
        table.get(&shifted).expect("k + 1 lies in K(n + r, r)").clone()
    })?;
    let sum_c: Rational = c.values().iter().sum();
    let sum_covol: Rational = covol.values().iter().sum();
    let weighted_sum: Rational = c.product(&covol)?.values().iter().sum();
    let size = Rational::from_integer(BigInt::from(lattice.len()));
    let lhs = &sum_c * &sum_covol;
    let rhs = &size * &weighted_sum;
    let correlation = correlate(&c, &covol)?;
    let identity_holds = &lhs - &rhs == -(&size * &size) * &correlation.gap;
    let equality = lhs == rhs;
    Ok(DurfeeReport {
        n,
        r,
        dim,
        sum_c,
        sum_covol,
        weighted_sum,
        lattice_size: lattice.len(),
        holds: lhs >= rhs,
        equality,
        identity_holds,
        correlation,
        inputs_equal,
        c_constant: c.is_constant(),
        equal_iff_inputs_equal: inputs_equal.map(|e| e == equality),
        lhs,
        rhs,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct JensenWitness {
    pub index: u64,
    pub bodies: Vec<RationalPolytope>,
    /// `Vol(A_1,A_2,A_3)^3`.
    #[serde(with = "serde_rational")]
    pub lhs: Rational,
    /// `V(A_1,A_1,A_2)·V(A_2,A_2,A_3)·V(A_3,A_3,A_1)`.
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct JensenReport {
    pub seed: u64,
    pub instances: u64,
    pub equalities: u64,
    pub witnesses_found: u64,
    /// The first few witnesses in instance order.
    pub witnesses: Vec<JensenWitness>,
}

/// Maximum number of witnesses kept in a [`JensenReport`].
pub const JENSEN_WITNESS_LIMIT: usize = 5;

/// Both sides of the cyclic Jensen-type comparison for three bodies in `R^3`.
pub fn jensen_sides(bodies: &[RationalPolytope]) -> Result<(Rational, Rational)> {
    if bodies.len() != 3 || bodies.iter().any(|b| b.dim() != 3) {
        return Err(Error::Domain("the cyclic comparison needs three bodies in R^3".into()));
    }
    let t = mixed_volumes(bodies)?;
    let v = |k: [u32; 3]| t.get(&k).expect("own key").clone();
    let lhs = num_traits::pow(v([1, 1, 1]), 3);
    let rhs = v([2, 1, 0]) * v([0, 2, 1]) * v([1, 0, 2]);
    Ok((lhs, rhs))
}

/// Seeded search for `Vol(A_1,A_2,A_3)^3 < V(A_1,A_1,A_2)·V(A_2,A_2,A_3)·V(A_3,A_3,A_1)`.
/// Finding no witness is a valid outcome.
pub fn jensen_counterexample_search(seed: u64, budget: u64) -> Result<JensenReport> {
    let results = (0..budget)
        .into_par_iter()
        .map(|i| {
            let mut rng = campaign_rng(seed, i);
            let bodies = (0..3).map(|_| random_body(&mut rng, 3)).collect::<Result<Vec<_>>>()?;
            let (lhs, rhs) = jensen_sides(&bodies)?;
            Ok((i, bodies, lhs, rhs))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = JensenReport { seed, instances: budget, equalities: 0, witnesses_found: 0, witnesses: Vec::new() };
    for (index, bodies, lhs, rhs) in results {
        if lhs == rhs {
            report.equalities += 1;
        }
        if lhs < rhs {
            report.witnesses_found += 1;
            if report.witnesses.len() < JENSEN_WITNESS_LIMIT {
                report.witnesses.push(JensenWitness { index, bodies, lhs, rhs });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::geometry::{random_newton, verify_af};

    #[test]
    fn product_equal_and_scaled() {
        let a = random_body(&mut campaign_rng(1, 0), 3).unwrap();
        let rep = verify_product_inequality(&[a.clone(), a.clone(), a.clone()]).unwrap();
        assert!(rep.passed() && rep.equality);
        let scaled: Vec<_> = [1, 2, 5].iter().map(|&d| a.scale(&int(d)).unwrap()).collect();
        let rep = verify_product_inequality(&scaled).unwrap();
        assert!(rep.passed() && rep.equality);
        // Both sides are (d1 d2 d3)^6 Vol(A)^6.
        assert_eq!(rep.lhs, num_traits::pow(a.volume() * int(10), 6));
    }

    #[test]
    fn product_first_factor_is_af() {
        let mut rng = campaign_rng(2, 4);
        let bodies: Vec<_> = (0..3).map(|_| random_body(&mut rng, 3).unwrap()).collect();
        let rep = verify_product_inequality(&bodies).unwrap();
        assert!(rep.passed());
        let af = verify_af(&bodies).unwrap();
        assert_eq!((&af.lhs, &af.rhs), (&rep.factors[0].lhs, &rep.factors[0].rhs));
    }

    #[test]
    fn durfee_equal_and_single() {
        let g = NewtonPolyhedron::new(3, vec![vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 1], vec![1, 1, 0]]).unwrap();
        let rep = verify_durfee_inequality(&[g.clone(), g.clone()]).unwrap();
        assert!(rep.passed() && rep.equality);
        assert_eq!((rep.n, rep.r), (1, 2));
        let rep = verify_durfee_inequality(std::slice::from_ref(&g)).unwrap();
        assert!(rep.passed() && rep.equality);
        assert_eq!(rep.lattice_size, 1);
    }

    #[test]
    fn durfee_desk_scale_c_is_constant() {
        let mut rng = campaign_rng(4, 0);
        let polys: Vec<_> = (0..2).map(|_| random_newton(&mut rng, 3).unwrap()).collect();
        let rep = verify_durfee_inequality(&polys).unwrap();
        assert!(rep.passed() && rep.c_constant && rep.equality);
    }

    #[test]
    fn durfee_abstract_scaled_family_is_strict() {
        // coVol(Γ^k) = ∏ d_i^{k_i} for Γ_i = d_i·Γ with coVol(Γ) = 1.
        let (dim, d) = (6u32, [1i64, 2, 3]);
        let values = crate::lattice::compositions(dim, 3)
            .iter()
            .map(|k| int(k.parts().iter().zip(&d).map(|(&e, &x)| x.pow(e)).product()))
            .collect();
        let table = MixedVolumeTable::from_values(TableKind::Covolume, dim as usize, 3, values);
        let rep = verify_durfee_table(&table).unwrap();
        assert!(rep.passed() && !rep.equality && rep.lhs > rep.rhs);
    }

    #[test]
    fn jensen_equal_bodies_not_witness() {
        let a = random_body(&mut campaign_rng(6, 0), 3).unwrap();
        let (l, r) = jensen_sides(&[a.clone(), a.clone(), a]).unwrap();
        assert_eq!(l, r);
        let rep = jensen_counterexample_search(0, 8).unwrap();
        assert_eq!(rep.instances, 8);
    }
}

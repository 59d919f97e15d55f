//! Mixed volumes and mixed covolumes under the multinomial normalization
//! `Vol_N(Σ λ_i A_i) = Σ_{k ∈ K(N, r)} multinomial(N; k)·V(A^k)·λ^k`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    format_rational, multinomial, parse_rational, rat_from_biguint, serde_rational, solve_linear, Rational,
};
use crate::error::{Error, Result};
use crate::lattice::{compositions, Composition};

use super::newton::{weighted_newton_sum, NewtonPolyhedron};
use super::polytope::{weighted_sum, RationalPolytope};
use super::{factorial_i, subsets_nonempty};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableKind {
    Volume,
    Covolume,
}

/// The coefficients `V(A_1^{k_1}, …, A_r^{k_r})` for all `k ∈ K(N, r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedVolumeTable {
    kind: TableKind,
    dim: usize,
    r: usize,
    keys: Vec<Composition>,
    values: Vec<Rational>,
    index: HashMap<Composition, usize>,
}

/// `{"n": N, "r": r, "covol": {"k1,k2,…": "p/q", …}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractTable {
    pub n: u32,
    pub r: usize,
    pub covol: BTreeMap<String, String>,
}

fn key_string(k: &Composition) -> String {
    k.parts().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
}

fn monomial(lambda: &[Rational], k: &[u32]) -> Rational {
    lambda
        .iter()
        .zip(k)
        .map(|(l, &e)| num_traits::pow(l.clone(), e as usize))
        .fold(Rational::one(), |a, b| a * b)
}

fn multinomial_rat(k: &[u32]) -> Rational {
    let parts: Vec<u64> = k.iter().map(|&p| p as u64).collect();
    rat_from_biguint(multinomial(&parts))
}

impl MixedVolumeTable {
    pub(crate) fn from_values(kind: TableKind, dim: usize, r: usize, values: Vec<Rational>) -> Self {
        let keys = compositions(dim as u32, r);
        debug_assert_eq!(keys.len(), values.len());
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Self { kind, dim, r, keys, values, index }
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Composition, &Rational)> {
        self.keys.iter().zip(&self.values)
    }

    pub fn get(&self, k: &[u32]) -> Result<&Rational> {
        let c = Composition::new(k.to_vec())?;
        self.index
            .get(&c)
            .map(|&i| &self.values[i])
            .ok_or_else(|| Error::Domain(format!("{c} is not a multi-index of K({},{})", self.dim, self.r)))
    }

    /// `Σ_k multinomial(N; k)·V(A^k)·λ^k`.
    pub fn polynomial_at(&self, lambda: &[Rational]) -> Result<Rational> {
        if lambda.len() != self.r {
            return Err(Error::DimensionMismatch { expected: self.r, found: lambda.len() });
        }
        Ok(self
            .entries()
            .map(|(k, v)| multinomial_rat(k.parts()) * v * monomial(lambda, k.parts()))
            .fold(Rational::zero(), |a, b| a + b))
    }

    /// The table of the bodies reordered as `bodies[perm[0]], bodies[perm[1]], …`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(self.values.len());
        for k in compositions(self.dim as u32, self.r) {
            let mut orig = vec![0u32; self.r];
            for (pos, &body) in perm.iter().enumerate() {
                orig[body] = k.parts()[pos];
            }
            values.push(self.get(&orig)?.clone());
        }
        Ok(Self::from_values(self.kind, self.dim, self.r, values))
    }

    pub fn to_abstract(&self) -> AbstractTable {
        AbstractTable {
            n: self.dim as u32,
            r: self.r,
            covol: self.entries().map(|(k, v)| (key_string(k), format_rational(v))).collect(),
        }
    }

    /// Validates an externally supplied covolume table: every multi-index
    /// present exactly once and every value positive.
    pub fn from_abstract(t: &AbstractTable) -> Result<Self> {
        if t.r == 0 {
            return Err(Error::Domain("table needs r >= 1".into()));
        }
        let keys = compositions(t.n, t.r);
        let mut values = Vec::with_capacity(keys.len());
        for k in &keys {
            let s = t
                .covol
                .get(&key_string(k))
                .ok_or_else(|| Error::Parse(format!("table is missing the entry {:?}", key_string(k))))?;
            let v = parse_rational(s)?;
            if !v.is_positive() {
                return Err(Error::Domain(format!("table entry {} = {} is not positive", key_string(k), s)));
            }
            values.push(v);
        }
        if t.covol.len() != keys.len() {
            return Err(Error::Parse(format!("table has {} entries, expected {}", t.covol.len(), keys.len())));
        }
        Ok(Self::from_values(TableKind::Covolume, t.n as usize, t.r, values))
    }
}

impl Serialize for MixedVolumeTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            kind: TableKind,
            n: usize,
            r: usize,
            values: &'a BTreeMap<String, String>,
        }
        let values = self.to_abstract().covol;
        Out { kind: self.kind, n: self.dim, r: self.r, values: &values }.serialize(s)
    }
}

/// Recovers the coefficients from evaluations at the nodes by solving the
/// exact Vandermonde-type system.
fn interpolate(dim: usize, r: usize, nodes: &[Vec<Rational>], evals: Vec<Rational>) -> Result<Vec<Rational>> {
    let keys = compositions(dim as u32, r);
    let matrix = nodes
        .iter()
        .map(|l| keys.iter().map(|k| monomial(l, k.parts())).collect())
        .collect();
    let coeffs = solve_linear(matrix, evals)?;
    Ok(coeffs
        .into_iter()
        .zip(&keys)
        .map(|(c, k)| c / multinomial_rat(k.parts()))
        .collect())
}

fn common_dim<T>(items: &[T], dim_of: impl Fn(&T) -> usize) -> Result<usize> {
    let first = items.first().ok_or_else(|| Error::Domain("empty body list".into()))?;
    let d = dim_of(first);
    if let Some(x) = items.iter().find(|x| dim_of(x) != d) {
        return Err(Error::DimensionMismatch { expected: d, found: dim_of(x) });
    }
    Ok(d)
}

fn int_vec(k: &Composition, shift: u32) -> Vec<Rational> {
    k.parts().iter().map(|&p| Rational::from_integer(BigInt::from(p + shift))).collect()
}

/// All mixed volumes of `bodies`, by interpolating `Vol_N(Σ λ_i A_i)` at the
/// nodes `λ ∈ K(N, r)`.
pub fn mixed_volumes(bodies: &[RationalPolytope]) -> Result<MixedVolumeTable> {
    let dim = common_dim(bodies, |b| b.dim())?;
    let r = bodies.len();
    let nodes: Vec<Vec<Rational>> = compositions(dim as u32, r).iter().map(|k| int_vec(k, 0)).collect();
    let evals = nodes
        .par_iter()
        .map(|l| weighted_sum(bodies, l).map(|p| p.volume().clone()))
        .collect::<Result<Vec<_>>>()?;
    let values = interpolate(dim, r, &nodes, evals)?;
    Ok(MixedVolumeTable::from_values(TableKind::Volume, dim, r, values))
}

/// All mixed covolumes of `polys`, interpolating at the positive nodes
/// `λ = k + 1`, `k ∈ K(N, r)`.
pub fn mixed_covolumes(polys: &[NewtonPolyhedron]) -> Result<MixedVolumeTable> {
    let dim = common_dim(polys, |p| p.dim())?;
    let r = polys.len();
    let keys = compositions(dim as u32, r);
    let nodes: Vec<Vec<Rational>> = keys.iter().map(|k| int_vec(k, 1)).collect();
    let evals = keys
        .par_iter()
        .map(|k| {
            let lambda: Vec<i64> = k.parts().iter().map(|&p| p as i64 + 1).collect();
            weighted_newton_sum(polys, &lambda)?.covolume()
        })
        .collect::<Result<Vec<_>>>()?;
    let values = interpolate(dim, r, &nodes, evals)?;
    Ok(MixedVolumeTable::from_values(TableKind::Covolume, dim, r, values))
}

/// `V(A_1, …, A_N) = (1/N!) Σ_{∅≠S⊆[N]} (-1)^{N-|S|} Vol_N(Σ_{i∈S} A_i)`.
pub fn polarization_mixed_volume(bodies: &[RationalPolytope]) -> Result<Rational> {
    let dim = common_dim(bodies, |b| b.dim())?;
    if bodies.len() != dim {
        return Err(Error::Domain(format!("polarization needs exactly {dim} bodies")));
    }
    polarize(dim, |s| {
        let lambda: Vec<Rational> = (0..dim).map(|i| if s.contains(&i) { Rational::one() } else { Rational::zero() }).collect();
        Ok(weighted_sum(bodies, &lambda)?.volume().clone())
    })
}

/// The covolume analogue of [`polarization_mixed_volume`].
pub fn polarization_mixed_covolume(polys: &[NewtonPolyhedron]) -> Result<Rational> {
    let dim = common_dim(polys, |p| p.dim())?;
    if polys.len() != dim {
        return Err(Error::Domain(format!("polarization needs exactly {dim} polyhedra")));
    }
    polarize(dim, |s| {
        let lambda: Vec<i64> = (0..dim).map(|i| s.contains(&i) as i64).collect();
        weighted_newton_sum(polys, &lambda)?.covolume()
    })
}

fn polarize(dim: usize, eval: impl Fn(&[usize]) -> Result<Rational>) -> Result<Rational> {
    let mut acc = Rational::zero();
    for s in subsets_nonempty(dim) {
        let v = eval(&s)?;
        if (dim - s.len()) % 2 == 0 {
            acc += v;
        } else {
            acc -= v;
        }
    }
    Ok(acc / Rational::from_integer(BigInt::from(factorial_i(dim))))
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadraticReport {
    pub dim: usize,
    /// `V(A_1, A_2, A_3, …)^2`.
    #[serde(with = "serde_rational")]
    pub lhs: Rational,
    /// `V(A_1, A_1, A_3, …)·V(A_2, A_2, A_3, …)`.
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
    pub holds: bool,
    pub equality: bool,
}

fn quadratic_entries(table: &MixedVolumeTable) -> (Rational, Rational) {
    let n = table.dim();
    let ones = vec![1u32; n];
    let mut a = ones.clone();
    a[0] = 2;
    a[1] = 0;
    let mut b = ones.clone();
    b[0] = 0;
    b[1] = 2;
    let mid = table.get(&ones).expect("own key").clone();
    let lhs = &mid * &mid;
    let rhs = table.get(&a).expect("own key") * table.get(&b).expect("own key");
    (lhs, rhs)
}

/// `V(A_1, …, A_N)^2 >= V(A_1, A_1, A_3, …)·V(A_2, A_2, A_3, …)` for exactly
/// `N >= 2` bodies in `R^N`.
pub fn verify_af(bodies: &[RationalPolytope]) -> Result<QuadraticReport> {
    let dim = common_dim(bodies, |b| b.dim())?;
    if bodies.len() != dim || dim < 2 {
        return Err(Error::Domain(format!("need exactly N >= 2 bodies in R^N, got {} in R^{dim}", bodies.len())));
    }
    let (lhs, rhs) = quadratic_entries(&mixed_volumes(bodies)?);
    Ok(QuadraticReport { dim, holds: lhs >= rhs, equality: lhs == rhs, lhs, rhs })
}

/// `coVol(Γ_1, …, Γ_N)^2 <= coVol(Γ_1, Γ_1, Γ_3, …)·coVol(Γ_2, Γ_2, Γ_3, …)`.
pub fn verify_teissier(polys: &[NewtonPolyhedron]) -> Result<QuadraticReport> {
    let dim = common_dim(polys, |p| p.dim())?;
    if polys.len() != dim || dim < 2 {
        return Err(Error::Domain(format!("need exactly N >= 2 polyhedra in R^N, got {} in R^{dim}", polys.len())));
    }
    let (lhs, rhs) = quadratic_entries(&mixed_covolumes(polys)?);
    Ok(QuadraticReport { dim, holds: lhs <= rhs, equality: lhs == rhs, lhs, rhs })
}

#[derive(Clone, Debug, Serialize)]
pub struct MultilinearityReport {
    #[serde(with = "serde_rational")]
    pub lhs: Rational,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
    pub holds: bool,
}

/// `V(A_11 + A_12, A_2, …) = V(A_11, A_2, …) + V(A_12, A_2, …)`.
pub fn multilinearity_check(
    a11: &RationalPolytope,
    a12: &RationalPolytope,
    rest: &[RationalPolytope],
) -> Result<MultilinearityReport> {
    let with = |first: RationalPolytope| {
        let mut list = vec![first];
        list.extend(rest.iter().cloned());
        polarization_mixed_volume(&list)
    };
    let lhs = with(a11.minkowski_sum(a12)?)?;
    let rhs = with(a11.clone())? + with(a12.clone())?;
    Ok(MultilinearityReport { holds: lhs == rhs, lhs, rhs })
}

/// The covolume analogue of [`multilinearity_check`].
pub fn multilinearity_check_covolume(
    g11: &NewtonPolyhedron,
    g12: &NewtonPolyhedron,
    rest: &[NewtonPolyhedron],
) -> Result<MultilinearityReport> {
    let with = |first: NewtonPolyhedron| {
        let mut list = vec![first];
        list.extend(rest.iter().cloned());
        polarization_mixed_covolume(&list)
    };
    let lhs = with(g11.sum(g12)?)?;
    let rhs = with(g11.clone())? + with(g12.clone())?;
    Ok(MultilinearityReport { holds: lhs == rhs, lhs, rhs })
}

//! Verifiers for the averaging inequalities on mixed volumes and mixed
//! covolumes, built from the lattice machinery and the geometry kernel.

mod campaign;
mod corollary;
mod examples;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::arith::{self, parse_rational, Rational};
use crate::averaging::{LatticeFunction, Monotonicity};
use crate::error::{Error, Result};
use crate::geometry::{mixed_covolumes, mixed_volumes, MixedVolumeTable, NewtonPolyhedron, RationalPolytope, TableKind};
use crate::lattice::{Composition, CompositionLattice};

pub use campaign::{
    af_campaign, corollary1_campaign, corollary2_campaign, durfee_campaign, exponent_campaign, fkg_random_campaign,
    product_campaign, random_mix_spec, symmetrized_monotone_campaign, teissier_campaign, CampaignReport,
    CampaignViolation,
};
pub use corollary::{
    verify_corollary_part1, verify_corollary_part2, verify_exponent_example, ExponentReport, Part1Report,
    Part2Report,
};
pub use examples::{
    durfee_multinomial, jensen_counterexample_search, jensen_sides, verify_durfee_inequality, verify_durfee_table,
    verify_product_inequality, DurfeeReport, JensenReport, JensenWitness, ProductReport, JENSEN_WITNESS_LIMIT,
};

/// Source of the mixed (co)volume values.
#[derive(Clone, Debug)]
pub enum MixData {
    Bodies(Vec<RationalPolytope>),
    Polyhedra(Vec<NewtonPolyhedron>),
    /// A validated table standing in for the geometry.
    Table(MixedVolumeTable),
}

/// `k ↦ V(A_1^{k_1}, …, A_r^{k_r}, A_{r+1}, …, A_{r'})` on `K(n, r)`,
/// `n = n' + r - r'`, through the embedding `k ↦ (k, 1, …, 1)`.
#[derive(Clone, Debug)]
pub struct MixFunctionSpec {
    n_outer: u32,
    r_outer: usize,
    r: usize,
    data: MixData,
}

impl MixFunctionSpec {
    pub fn new(r: usize, data: MixData) -> Result<Self> {
        let (n_outer, r_outer) = match &data {
            MixData::Bodies(b) => (b.first().map_or(0, |x| x.dim()) as u32, b.len()),
            MixData::Polyhedra(p) => (p.first().map_or(0, |x| x.dim()) as u32, p.len()),
            MixData::Table(t) => (t.dim() as u32, t.r()),
        };
        if r_outer == 0 {
            return Err(Error::Domain("no bodies given".into()));
        }
        if r == 0 || r > r_outer {
            return Err(Error::Domain(format!("need 1 <= r <= r' = {r_outer}, got r = {r}")));
        }
        if (n_outer as usize) + r < r_outer {
            return Err(Error::Domain(format!(
                "n = n' + r - r' = {n_outer} + {r} - {r_outer} is negative"
            )));
        }
        match &data {
            MixData::Bodies(b) => check_same_dim(b.iter().map(|x| x.dim()))?,
            MixData::Polyhedra(p) => check_same_dim(p.iter().map(|x| x.dim()))?,
            MixData::Table(_) => {}
        }
        Ok(Self { n_outer, r_outer, r, data })
    }

    pub fn bodies(r: usize, bodies: Vec<RationalPolytope>) -> Result<Self> {
        Self::new(r, MixData::Bodies(bodies))
    }

    pub fn polyhedra(r: usize, polys: Vec<NewtonPolyhedron>) -> Result<Self> {
        Self::new(r, MixData::Polyhedra(polys))
    }

    pub fn table(r: usize, table: MixedVolumeTable) -> Result<Self> {
        Self::new(r, MixData::Table(table))
    }

    pub fn n_outer(&self) -> u32 {
        self.n_outer
    }

    pub fn r_outer(&self) -> usize {
        self.r_outer
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Inner sum `n = n' + r - r'`.
    pub fn n(&self) -> u32 {
        self.n_outer + self.r as u32 - self.r_outer as u32
    }

    pub fn data(&self) -> &MixData {
        &self.data
    }

    pub fn kind(&self) -> TableKind {
        match &self.data {
            MixData::Bodies(_) => TableKind::Volume,
            MixData::Polyhedra(_) => TableKind::Covolume,
            MixData::Table(t) => t.kind(),
        }
    }

    pub fn is_geometric(&self) -> bool {
        !matches!(self.data, MixData::Table(_))
    }

    /// Whether the first `r` inputs coincide; `None` for tables.
    pub fn inner_inputs_equal(&self) -> Option<bool> {
        match &self.data {
            MixData::Bodies(b) => Some(b[..self.r].windows(2).all(|w| w[0] == w[1])),
            MixData::Polyhedra(p) => Some(p[..self.r].windows(2).all(|w| w[0] == w[1])),
            MixData::Table(_) => None,
        }
    }

    /// Full table over `K(n', r')`.
    pub fn outer_table(&self) -> Result<MixedVolumeTable> {
        match &self.data {
            MixData::Bodies(b) => mixed_volumes(b),
            MixData::Polyhedra(p) => mixed_covolumes(p),
            MixData::Table(t) => Ok(t.clone()),
        }
    }

    fn embed(&self, k: &Composition) -> Vec<u32> {
        let mut full = k.parts().to_vec();
        full.resize(self.r_outer, 1);
        full
    }
}

fn check_same_dim(mut dims: impl Iterator<Item = usize>) -> Result<()> {
    let first = dims.next().unwrap_or(0);
    match dims.find(|&d| d != first) {
        Some(d) => Err(Error::DimensionMismatch { expected: first, found: d }),
        None => Ok(()),
    }
}

/// The function on `K(n, r)` for any source kind.
pub fn mix_function(spec: &MixFunctionSpec) -> Result<LatticeFunction> {
    let table = spec.outer_table()?;
    mix_function_from_table(spec, &table)
}

pub(crate) fn mix_function_from_table(spec: &MixFunctionSpec, table: &MixedVolumeTable) -> Result<LatticeFunction> {
    let lattice = Arc::new(CompositionLattice::new(spec.n(), spec.r)?);
    let values = lattice
        .elements()
        .iter()
        .map(|k| table.get(&spec.embed(k)).cloned())
        .collect::<Result<Vec<_>>>()?;
    LatticeFunction::new(lattice, values)
}

/// `Mix.coVol`; the spec must carry polyhedra or a covolume table.
pub fn mix_covol_function(spec: &MixFunctionSpec) -> Result<LatticeFunction> {
    if spec.kind() != TableKind::Covolume {
        return Err(Error::Domain("expected Newton polyhedra or a covolume table".into()));
    }
    mix_function(spec)
}

/// `Mix.Vol`; the spec must carry convex bodies or a volume table.
pub fn mix_vol_function(spec: &MixFunctionSpec) -> Result<LatticeFunction> {
    if spec.kind() != TableKind::Volume {
        return Err(Error::Domain("expected convex bodies or a volume table".into()));
    }
    mix_function(spec)
}

/// Exact monotonicity of `[ln f]`, the orbit average of `ln f`: orbits are
/// compared through `(∏_O f)^{L/|O|}` with `L` the lcm of the orbit sizes.
#[derive(Clone, Debug, Serialize)]
pub struct LogSymmetrization {
    pub direction: Monotonicity,
    /// A quotient cover `(upper, lower)` violating the non-decreasing
    /// direction, when one exists.
    pub decreasing_cover: Option<(Composition, Composition)>,
    pub increasing_cover: Option<(Composition, Composition)>,
}

pub fn log_symmetrization(f: &LatticeFunction) -> Result<LogSymmetrization> {
    let lat = f.lattice();
    if let Some(i) = f.values().iter().position(|v| !v.is_positive()) {
        return Err(Error::Domain(format!("ln needs positive values; f{} = {}", lat.element(i), f.value_at(i))));
    }
    let l = lat.orbits().iter().fold(1usize, |acc, o| acc.lcm(&o.len()));
    let powered: Vec<Rational> = lat
        .orbits()
        .iter()
        .map(|orbit| {
            let prod: Rational = orbit.iter().map(|&i| f.value_at(i).clone()).product();
            arith::pow(&prod, (l / orbit.len()) as i64)
        })
        .collect();
    let mut decreasing_cover = None;
    let mut increasing_cover = None;
    for &(u, d) in lat.covers() {
        let (ou, od) = (lat.orbit_of(u), lat.orbit_of(d));
        let pair = || (lat.element(u).sorted_desc(), lat.element(d).sorted_desc());
        if powered[ou] < powered[od] && decreasing_cover.is_none() {
            decreasing_cover = Some(pair());
        }
        if powered[ou] > powered[od] && increasing_cover.is_none() {
            increasing_cover = Some(pair());
        }
    }
    let direction = match (&decreasing_cover, &increasing_cover) {
        (None, None) => Monotonicity::Constant,
        (None, Some(_)) => Monotonicity::NonDecreasing,
        (Some(_), None) => Monotonicity::NonIncreasing,
        (Some(_), Some(_)) => Monotonicity::Neither,
    };
    Ok(LogSymmetrization { direction, decreasing_cover, increasing_cover })
}

/// The direction the averaging lemma predicts for the symmetrization:
/// non-decreasing for covolumes, non-increasing for volumes (logarithmic
/// form only).
pub fn expected_direction(kind: TableKind) -> Monotonicity {
    match kind {
        TableKind::Covolume => Monotonicity::NonDecreasing,
        TableKind::Volume => Monotonicity::NonIncreasing,
    }
}

pub(crate) fn direction_compatible(found: Monotonicity, expected: Monotonicity) -> bool {
    found == Monotonicity::Constant || found == expected
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetrizedMonotoneReport {
    pub kind: TableKind,
    pub n: u32,
    pub r: usize,
    pub n_outer: u32,
    pub r_outer: usize,
    /// Direction of the orbit average `[Mix]`.
    pub direction: Monotonicity,
    /// Direction of the orbit average `[ln Mix]`.
    pub log_direction: Monotonicity,
    pub expected: Monotonicity,
    /// `[Mix]` has the expected direction (covolumes only).
    pub holds: bool,
    pub log_holds: bool,
    pub witness: Option<(Composition, Composition)>,
    /// Quadratic inequalities on segment triples of `K(n', r')`.
    pub quadratic_checks: usize,
    pub quadratic_failures: usize,
    /// `2·V(m) <= V(m + e_i - e_j) + V(m - e_i + e_j)` (covolumes only).
    pub convexity_checks: usize,
    pub convexity_failures: usize,
}

impl SymmetrizedMonotoneReport {
    pub fn passed(&self) -> bool {
        self.holds && self.log_holds && self.quadratic_failures == 0 && self.convexity_failures == 0
    }
}

/// Segment triples `(m + e_i - e_j, m, m - e_i + e_j)` in `K(N, r')`.
fn segment_triples(table: &MixedVolumeTable) -> Vec<(Vec<u32>, Vec<u32>, Vec<u32>)> {
    let mut out = Vec::new();
    for (m, _) in table.entries() {
        let m = m.parts();
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                if m[i] == 0 || m[j] == 0 {
                    continue;
                }
                let mut a = m.to_vec();
                a[i] += 1;
                a[j] -= 1;
                let mut b = m.to_vec();
                b[i] -= 1;
                b[j] += 1;
                out.push((a, m.to_vec(), b));
            }
        }
    }
    out
}

/// The symmetrization lemma: `[Mix.coVol]` non-decreasing (and `[ln Mix]`
/// with the predicted direction for either kind), together with the
/// quadratic and weak convexity inequalities it rests on.
pub fn verify_symmetrized_monotone(spec: &MixFunctionSpec) -> Result<SymmetrizedMonotoneReport> {
    let table = spec.outer_table()?;
    let f = mix_function_from_table(spec, &table)?;
    let kind = spec.kind();
    let expected = expected_direction(kind);
    let sym = f.symmetrize();
    let direction = sym.monotonicity();
    let log_direction = log_symmetrization(&f)?.direction;
    let (holds, witness) = match kind {
        TableKind::Covolume => {
            let w = sym.monotonicity_witness(true);
            (w.is_none(), w)
        }
        TableKind::Volume => (true, None),
    };
    let two = Rational::from_integer(BigInt::from(2));
    let mut quadratic_checks = 0;
    let mut quadratic_failures = 0;
    let mut convexity_checks = 0;
    let mut convexity_failures = 0;
    for (a, m, b) in segment_triples(&table) {
        let (va, vm, vb) = (table.get(&a)?, table.get(&m)?, table.get(&b)?);
        let sq = vm * vm;
        let prod = va * vb;
        quadratic_checks += 1;
        let ok = match kind {
            TableKind::Covolume => sq <= prod,
            TableKind::Volume => sq >= prod,
        };
        if !ok {
            quadratic_failures += 1;
        }
        if kind == TableKind::Covolume {
            convexity_checks += 1;
            if &two * vm > va + vb {
                convexity_failures += 1;
            }
        }
    }
    Ok(SymmetrizedMonotoneReport {
        kind,
        n: spec.n(),
        r: spec.r,
        n_outer: spec.n_outer,
        r_outer: spec.r_outer,
        direction,
        log_direction,
        expected,
        holds,
        log_holds: direction_compatible(log_direction, expected),
        witness,
        quadratic_checks,
        quadratic_failures,
        convexity_checks,
        convexity_failures,
    })
}

/// An invariant function on `K(n, r)` from values on class representatives
/// (keys `"k1,k2,…"`, any order of parts), extended by the `Ξ_r` action.
pub fn invariant_function_from_classes(
    lattice: Arc<CompositionLattice>,
    classes: &BTreeMap<String, String>,
) -> Result<LatticeFunction> {
    let quotient = lattice.quotient();
    let mut values: Vec<Option<Rational>> = vec![None; quotient.len()];
    for (key, value) in classes {
        let parts = key
            .split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|e| Error::Parse(format!("bad class key {key:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let c = quotient.class_index(&parts)?;
        let v = parse_rational(value)?;
        if values[c].replace(v).is_some() {
            return Err(Error::Parse(format!("class {} given twice", quotient.class(c))));
        }
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(c, v)| v.ok_or_else(|| Error::Parse(format!("no value for class {}", quotient.class(c)))))
        .collect::<Result<Vec<_>>>()?;
    LatticeFunction::from_fn(lattice.clone(), |k| {
        let c = lattice.orbit_of(lattice.index_of(k).expect("own element"));
        values[c].clone()
    })
}

/// `C(k) = Σ k_i^2`, invariant and non-decreasing.
pub fn sum_of_squares_function(lattice: Arc<CompositionLattice>) -> Result<LatticeFunction> {
    LatticeFunction::from_fn(lattice, |k| Rational::from_integer(BigInt::from(k.sum_of_squares())))
}

/// Smallest integer `t >= 1` with `t^dim · min >= 1`.
pub(crate) fn rescale_factor(min: &Rational, dim: u32) -> u64 {
    let mut t = 1u64;
    while arith::pow(&Rational::from_integer(BigInt::from(t)), dim as i64) * min < Rational::one() {
        t += 1;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::geometry::{campaign_rng, random_newton};

    fn simplex_poly(m: i64) -> NewtonPolyhedron {
        NewtonPolyhedron::new(2, vec![vec![m, 0], vec![0, m]]).unwrap()
    }

    #[test]
    fn spec_validation() {
        let p = simplex_poly(2);
        assert!(MixFunctionSpec::polyhedra(0, vec![p.clone()]).is_err());
        assert!(MixFunctionSpec::polyhedra(2, vec![p.clone()]).is_err());
        // n' = 2, r' = 4, r = 1: n = -1.
        assert!(MixFunctionSpec::polyhedra(1, vec![p.clone(); 4]).is_err());
        let s = MixFunctionSpec::polyhedra(2, vec![p.clone(); 3]).unwrap();
        assert_eq!((s.n(), s.r()), (1, 2));
        assert!(mix_vol_function(&s).is_err());
    }

    #[test]
    fn equal_inputs_give_constant_function() {
        let p = simplex_poly(3);
        let s = MixFunctionSpec::polyhedra(2, vec![p.clone(), p.clone()]).unwrap();
        let f = mix_covol_function(&s).unwrap();
        assert!(f.is_constant());
        assert_eq!(*f.value_at(0), p.covolume().unwrap());
        let rep = verify_symmetrized_monotone(&s).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.direction, Monotonicity::Constant);
    }

    #[test]
    fn scaled_family_values() {
        let g = NewtonPolyhedron::new(2, vec![vec![2, 0], vec![1, 1], vec![0, 3]]).unwrap();
        let base = g.covolume().unwrap();
        let d = [3i64, 1];
        let s = MixFunctionSpec::polyhedra(2, d.iter().map(|&x| g.scale(x).unwrap()).collect()).unwrap();
        let f = mix_covol_function(&s).unwrap();
        for (k, v) in f.lattice().elements().iter().zip(f.values()) {
            let prod: i64 = k.parts().iter().zip(&d).map(|(&e, &x)| x.pow(e)).product();
            assert_eq!(*v, &base * int(prod));
        }
        let rep = verify_symmetrized_monotone(&s).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.direction, Monotonicity::NonDecreasing);
    }

    #[test]
    fn matches_table_lookups() {
        let mut rng = campaign_rng(11, 0);
        let polys: Vec<_> = (0..3).map(|_| random_newton(&mut rng, 3).unwrap()).collect();
        let table = mixed_covolumes(&polys).unwrap();
        let s = MixFunctionSpec::polyhedra(3, polys).unwrap();
        let f = mix_covol_function(&s).unwrap();
        for (k, v) in f.lattice().elements().iter().zip(f.values()) {
            assert_eq!(table.get(k.parts()).unwrap(), v);
        }
    }

    #[test]
    fn class_function_parsing() {
        let lat = Arc::new(CompositionLattice::new(3, 3).unwrap());
        let mut m = BTreeMap::new();
        m.insert("3,0,0".to_string(), "5".to_string());
        m.insert("1,2,0".to_string(), "2".to_string());
        assert!(invariant_function_from_classes(lat.clone(), &m).is_err());
        m.insert("1,1,1".to_string(), "1/2".to_string());
        let c = invariant_function_from_classes(lat.clone(), &m).unwrap();
        assert!(c.is_invariant());
        assert_eq!(c.monotonicity(), Monotonicity::NonDecreasing);
        assert_eq!(*c.value(&Composition::new(vec![0, 2, 1]).unwrap()).unwrap(), int(2));
    }

    #[test]
    fn rescale_factor_values() {
        assert_eq!(rescale_factor(&int(2), 3), 1);
        assert_eq!(rescale_factor(&crate::arith::rat(1, 9), 2), 3);
        assert_eq!(rescale_factor(&crate::arith::rat(1, 10), 2), 4);
    }
}

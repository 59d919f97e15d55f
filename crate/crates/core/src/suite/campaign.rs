use std::sync::Arc;

use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{format_rational, Rational};
use crate::averaging::{verify_fkg, Direction, GeometricStatus, LatticeFunction};
use crate::error::Result;
use crate::geometry::{
    campaign_rng, random_body, random_newton, verify_af, verify_teissier, NewtonPolyhedron, RationalPolytope,
    TableKind,
};

use crate::lattice::CompositionLattice;

use super::{
    sum_of_squares_function, verify_corollary_part1, verify_corollary_part2, verify_durfee_inequality,
    verify_exponent_example, verify_product_inequality, verify_symmetrized_monotone, MixData, MixFunctionSpec,
};

/// A failed instance: its stream index, inputs and the verifier's output.
#[derive(Clone, Debug, Serialize)]
pub struct CampaignViolation {
    pub index: u64,
    pub input: serde_json::Value,
    pub detail: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct CampaignReport {
    pub check: String,
    pub seed: u64,
    pub instances: u64,
    pub violations: u64,
    pub equalities: u64,
    pub first_violation: Option<CampaignViolation>,
}

impl CampaignReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

struct Outcome {
    index: u64,
    ok: bool,
    equality: bool,
    input: serde_json::Value,
    detail: serde_json::Value,
}

fn run<F>(check: &str, seed: u64, budget: u64, one: F) -> Result<CampaignReport>
where
    F: Fn(u64) -> Result<Outcome> + Sync,
{
    let outcomes = (0..budget).into_par_iter().map(&one).collect::<Result<Vec<_>>>()?;
    let mut report = CampaignReport {
        check: check.to_string(),
        seed,
        instances: budget,
        violations: 0,
        equalities: 0,
        first_violation: None,
    };
    for o in outcomes {
        report.equalities += o.equality as u64;
        if !o.ok {
            report.violations += 1;
            if report.first_violation.is_none() {
                report.first_violation = Some(CampaignViolation { index: o.index, input: o.input, detail: o.detail });
            }
        }
    }
    Ok(report)
}

fn json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Alexandrov-Fenchel on `budget` seeded random `dim`-tuples of bodies.
pub fn af_campaign(seed: u64, budget: u64, dim: usize) -> Result<CampaignReport> {
    run("af", seed, budget, |i| {
        let mut rng = campaign_rng(seed, i);
        let bodies = (0..dim).map(|_| random_body(&mut rng, dim)).collect::<Result<Vec<RationalPolytope>>>()?;
        let rep = verify_af(&bodies)?;
        Ok(Outcome { index: i, ok: rep.holds, equality: rep.equality, input: json(&bodies), detail: json(&rep) })
    })
}

/// Teissier on `budget` seeded random `dim`-tuples of Newton polyhedra.
pub fn teissier_campaign(seed: u64, budget: u64, dim: usize) -> Result<CampaignReport> {
    run("teissier", seed, budget, |i| {
        let mut rng = campaign_rng(seed, i);
        let polys = (0..dim).map(|_| random_newton(&mut rng, dim)).collect::<Result<Vec<NewtonPolyhedron>>>()?;
        let rep = verify_teissier(&polys)?;
        Ok(Outcome { index: i, ok: rep.holds, equality: rep.equality, input: json(&polys), detail: json(&rep) })
    })
}

/// A random spec with `n' = 3`, `r' = 3` and `r` in `2..=3`.
pub fn random_mix_spec<R: Rng>(rng: &mut R, kind: TableKind) -> Result<MixFunctionSpec> {
    let r = rng.gen_range(2..=3);
    let data = match kind {
        TableKind::Covolume => MixData::Polyhedra((0..3).map(|_| random_newton(rng, 3)).collect::<Result<_>>()?),
        TableKind::Volume => MixData::Bodies((0..3).map(|_| random_body(rng, 3)).collect::<Result<_>>()?),
    };
    MixFunctionSpec::new(r, data)
}

/// The symmetrization lemma on `budget` random covolume specs.
pub fn symmetrized_monotone_campaign(seed: u64, budget: u64) -> Result<CampaignReport> {
    run("symmetrized-monotone", seed, budget, |i| {
        let mut rng = campaign_rng(seed, i);
        let spec = random_mix_spec(&mut rng, TableKind::Covolume)?;
        let rep = verify_symmetrized_monotone(&spec)?;
        let input = match spec.data() {
            MixData::Polyhedra(p) => json(p),
            _ => serde_json::Value::Null,
        };
        Ok(Outcome {
            index: i,
            ok: rep.passed(),
            equality: rep.direction == crate::averaging::Monotonicity::Constant,
            input,
            detail: json(&rep),
        })
    })
}

/// A random non-negative combination of up-set indicators: up-closures of
/// whole orbits when `invariant`, of single elements otherwise.
fn random_monotone<R: Rng>(rng: &mut R, lattice: &Arc<CompositionLattice>, invariant: bool) -> Result<LatticeFunction> {
    let mut values = vec![Rational::zero(); lattice.len()];
    for _ in 0..rng.gen_range(1..=3) {
        let seed_elem = rng.gen_range(0..lattice.len());
        let generators: Vec<usize> = if invariant {
            lattice.orbits()[lattice.orbit_of(seed_elem)].clone()
        } else {
            vec![seed_elem]
        };
        let w = Rational::from_integer(rng.gen_range(0i64..=4).into());
        for (j, v) in values.iter_mut().enumerate() {
            if generators.iter().any(|&g| lattice.leq_idx(g, j)) {
                *v += &w;
            }
        }
    }
    LatticeFunction::new(lattice.clone(), values)
}

/// Random monotone-function fuzzing of the averaging inequality on
/// `K(n, r)`: `f` invariant non-decreasing, `g` monotone in a random
/// direction.
pub fn fkg_random_campaign(lattice: Arc<CompositionLattice>, seed: u64, budget: u64) -> Result<CampaignReport> {
    run("fkg-random", seed, budget, |i| {
        let mut rng = campaign_rng(seed, i);
        let f = random_monotone(&mut rng, &lattice, true)?;
        let g_invariant = rng.gen_bool(0.5);
        let mut g = random_monotone(&mut rng, &lattice, g_invariant)?;
        let direction = if rng.gen_bool(0.5) {
            g = g.reflect();
            Direction::IncreasingDecreasing
        } else {
            Direction::IncreasingIncreasing
        };
        let rep = verify_fkg(&f, &g, direction)?;
        let input = serde_json::json!({
            "f": f.values().iter().map(format_rational).collect::<Vec<_>>(),
            "g": g.values().iter().map(format_rational).collect::<Vec<_>>(),
        });
        Ok(Outcome { index: i, ok: rep.passed(), equality: rep.equality, input, detail: json(&rep) })
    })
}

/// The product-of-six inequality on `budget` random triples in `R^3`.
pub fn product_campaign(seed: u64, budget: u64) -> Result<CampaignReport> {
    run("product", seed, budget, |i| {
        let mut rng = campaign_rng(seed, i);
        let bodies = (0..3).map(|_| random_body(&mut rng, 3)).collect::<Result<Vec<_>>>()?;
        let rep = verify_product_inequality(&bodies)?;
        Ok(Outcome { index: i, ok: rep.passed(), equality: rep.equality, input: json(&bodies), detail: json(&rep) })
    })
}

/// Part 1 with `C = Σ k_i^2` on `budget` random covolume specs.
pub fn corollary1_campaign(seed: u64, budget: u64) -> Result<CampaignReport> {
    run("corollary1", seed, budget, |i| {
        let mut rng = campaign_rng(seed, i);
        let spec = random_mix_spec(&mut rng, TableKind::Covolume)?;
        let c = sum_of_squares_function(Arc::new(CompositionLattice::new(spec.n(), spec.r())?))?;
        let rep = verify_corollary_part1(&spec, &c)?;
        Ok(Outcome {
            index: i,
            ok: rep.passed(),
            equality: rep.correlation.equality,
            input: spec_json(&spec),
            detail: json(&rep),
        })
    })
}

/// Part 2 with `C = Σ k_i^2`, alternating covolume and volume specs.
pub fn corollary2_campaign(seed: u64, budget: u64) -> Result<CampaignReport> {
    run("corollary2", seed, budget, |i| {
        let mut rng = campaign_rng(seed, i);
        let kind = if i % 2 == 0 { TableKind::Covolume } else { TableKind::Volume };
        let spec = random_mix_spec(&mut rng, kind)?;
        let c = sum_of_squares_function(Arc::new(CompositionLattice::new(spec.n(), spec.r())?))?;
        let rep = verify_corollary_part2(&spec, &c, true)?;
        Ok(Outcome {
            index: i,
            ok: rep.passed(),
            equality: rep.status == GeometricStatus::Equal,
            input: spec_json(&spec),
            detail: json(&rep),
        })
    })
}

/// The exponent example for random `a >= b >= c` in `0..=6` and random
/// bodies in `R^3`.
pub fn exponent_campaign(seed: u64, budget: u64) -> Result<CampaignReport> {
    run("exponent", seed, budget, |i| {
        let mut rng = campaign_rng(seed, i);
        let mut abc = [0i64; 3].map(|_| rng.gen_range(0..=6));
        abc.sort_unstable_by(|x, y| y.cmp(x));
        let bodies = (0..3).map(|_| random_body(&mut rng, 3)).collect::<Result<Vec<_>>>()?;
        let rep = verify_exponent_example(&bodies, abc[0], abc[1], abc[2])?;
        Ok(Outcome { index: i, ok: rep.passed(), equality: rep.equality, input: json(&bodies), detail: json(&rep) })
    })
}

/// The multinomial-weighted covolume inequality for 1 to 3 random Newton
/// polyhedra in `R^3`.
pub fn durfee_campaign(seed: u64, budget: u64) -> Result<CampaignReport> {
    run("durfee", seed, budget, |i| {
        let mut rng = campaign_rng(seed, i);
        let r = rng.gen_range(1..=3);
        let polys = (0..r).map(|_| random_newton(&mut rng, 3)).collect::<Result<Vec<_>>>()?;
        let rep = verify_durfee_inequality(&polys)?;
        Ok(Outcome { index: i, ok: rep.passed(), equality: rep.equality, input: json(&polys), detail: json(&rep) })
    })
}

fn spec_json(spec: &MixFunctionSpec) -> serde_json::Value {
    let data = match spec.data() {
        MixData::Bodies(b) => json(b),
        MixData::Polyhedra(p) => json(p),
        MixData::Table(t) => json(&t.to_abstract()),
    };
    serde_json::json!({ "r": spec.r(), "data": data })
}

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{self, serde_rational, Rational};
use crate::averaging::{
    classify_log_gap, correlate, gap, log_gap_certified, CorrelationReport, GeometricStatus, LatticeFunction,
    Monotonicity,
};
use crate::error::{Error, Result};
use crate::geometry::{RationalPolytope, TableKind};
use crate::interval;
use crate::lattice::CompositionLattice;

use super::{
    direction_compatible, expected_direction, invariant_function_from_classes, log_symmetrization, mix_function,
    rescale_factor, MixFunctionSpec,
};

#[derive(Clone, Debug, Serialize)]
pub struct Part1Report {
    pub n: u32,
    pub r: usize,
    pub n_outer: u32,
    pub r_outer: usize,
    /// `C` against `Mix.coVol` directly.
    pub correlation: CorrelationReport,
    /// The same gap computed against `[Mix.coVol]`.
    #[serde(with = "serde_rational")]
    pub symmetrized_gap: Rational,
    pub paths_agree: bool,
    pub inner_inputs_equal: Option<bool>,
    /// `C` constant or the first `r` inputs equal.
    pub symbolic_equality: bool,
}

impl Part1Report {
    pub fn passed(&self) -> bool {
        self.correlation.passed() && self.paths_agree && (!self.symbolic_equality || self.correlation.equality)
    }
}

/// `Av(C)·Av(Mix.coVol) <= Av(C·Mix.coVol)` for invariant monotone `C`;
/// a non-increasing `C` reverses the sign.
pub fn verify_corollary_part1(spec: &MixFunctionSpec, c: &LatticeFunction) -> Result<Part1Report> {
    if spec.kind() != TableKind::Covolume {
        return Err(Error::Domain("part 1 concerns mixed covolumes".into()));
    }
    let mix = mix_function(spec)?;
    check_same_lattice(c, &mix)?;
    let correlation = correlate(c, &mix)?;
    let symmetrized_gap = gap(c, &mix.symmetrize())?;
    let inner_inputs_equal = spec.inner_inputs_equal();
    Ok(Part1Report {
        n: spec.n(),
        r: spec.r(),
        n_outer: spec.n_outer(),
        r_outer: spec.r_outer(),
        paths_agree: symmetrized_gap == correlation.gap,
        symmetrized_gap,
        symbolic_equality: c.is_constant() || inner_inputs_equal == Some(true),
        inner_inputs_equal,
        correlation,
    })
}

fn check_same_lattice(c: &LatticeFunction, mix: &LatticeFunction) -> Result<()> {
    let (a, b) = (c.lattice(), mix.lattice());
    if a.n() != b.n() || a.r() != b.r() {
        return Err(Error::Domain(format!(
            "C lives on K({},{}) but the mixed function on K({},{})",
            a.n(),
            a.r(),
            b.n(),
            b.r()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct Part2Report {
    pub kind: TableKind,
    pub n: u32,
    pub r: usize,
    pub n_outer: u32,
    pub r_outer: usize,
    /// All inputs were scaled by this integer so that every value is `>= 1`;
    /// the values themselves scale by `t^{n'}`.
    pub rescale_factor: u64,
    #[serde(with = "serde_rational")]
    pub value_scale: Rational,
    pub c_direction: Monotonicity,
    /// Direction of `[ln Mix]`.
    pub log_direction: Monotonicity,
    pub expected_log_direction: Monotonicity,
    #[serde(with = "serde_rational")]
    pub av_c: Rational,
    /// Enclosure of `Av(C·ln Mix) - Av(C)·Av(ln Mix)`.
    pub log_gap_lo: f64,
    pub log_gap_hi: f64,
    pub precision_bits: u32,
    pub predicted_sign: i8,
    pub symbolic_equality: bool,
    pub status: GeometricStatus,
    pub consistent: bool,
}

impl Part2Report {
    pub fn passed(&self) -> bool {
        self.consistent && self.status != GeometricStatus::Violated
    }
}

/// `(Av^G Mix.coVol)^{Av C} <= Av^G(Mix.coVol^C)` and
/// `(Av^G Mix.Vol)^{Av C} >= Av^G(Mix.Vol^C)`, in logarithmic form with a
/// certified enclosure. Values below 1 are lifted by an integer rescaling
/// when `allow_rescale` is set; the log gap does not change under it.
pub fn verify_corollary_part2(spec: &MixFunctionSpec, c: &LatticeFunction, allow_rescale: bool) -> Result<Part2Report> {
    let mix = mix_function(spec)?;
    check_same_lattice(c, &mix)?;
    if let Some((a, b)) = c.invariance_witness() {
        return Err(Error::Precondition(format!("C is not invariant: C{a} != C{b}")));
    }
    if let Some(i) = c.values().iter().position(|v| v.is_negative()) {
        return Err(Error::Domain(format!("C must be >= 0; C{} = {}", c.lattice().element(i), c.value_at(i))));
    }
    let c_direction = c.monotonicity();
    let c_sign = c_direction
        .sign()
        .ok_or_else(|| Error::Precondition("C is not monotone".into()))?;
    let min = mix.values().iter().min().cloned().unwrap_or_else(Rational::one);
    if !min.is_positive() {
        return Err(Error::Domain(format!("mixed values must be positive, found {min}")));
    }
    let t = if min < Rational::one() {
        if !allow_rescale {
            return Err(Error::Domain(format!("a mixed value is {min} < 1 and rescaling is disabled")));
        }
        rescale_factor(&min, spec.n_outer())
    } else {
        1
    };
    let value_scale = arith::pow(&Rational::from_integer(BigInt::from(t)), spec.n_outer() as i64);
    let zero = Rational::zero();
    let scaled = mix.combine(&value_scale, &mix, &zero)?;

    let kind = spec.kind();
    let expected_log_direction = expected_direction(kind);
    let log_direction = log_symmetrization(&scaled)?.direction;
    let lemma_ok = direction_compatible(log_direction, expected_log_direction);
    let log_sign = match log_direction.sign() {
        Some(s) => s,
        None if spec.is_geometric() => 0,
        None => return Err(Error::Precondition("[ln Mix] is not monotone for the given table".into())),
    };
    let predicted_sign = c_sign * log_sign;
    let symbolic_equality = c.is_constant() || log_direction == Monotonicity::Constant;
    let (sign, iv, precision_bits) = log_gap_certified(&scaled, c, interval::START_PRECISION)?;
    let (mut status, consistent) = classify_log_gap(&sign, predicted_sign, symbolic_equality);
    if spec.is_geometric() && !lemma_ok {
        status = GeometricStatus::Violated;
    }
    Ok(Part2Report {
        kind,
        n: spec.n(),
        r: spec.r(),
        n_outer: spec.n_outer(),
        r_outer: spec.r_outer(),
        rescale_factor: t,
        value_scale,
        c_direction,
        log_direction,
        expected_log_direction,
        av_c: c.average(),
        log_gap_lo: arith::to_f64(iv.lo()),
        log_gap_hi: arith::to_f64(iv.hi()),
        precision_bits,
        predicted_sign,
        symbolic_equality,
        status,
        consistent,
    })
}

/// `Vol(A_1,A_2,A_3)^{3a+6b-9c} >= (∏ V(A_i^3))^{7a-6b-c}·(∏_{i≠j} V(A_i^2,A_j))^{4b-3a-c}`,
/// checked exactly after moving negative exponents across.
#[derive(Clone, Debug, Serialize)]
pub struct ExponentReport {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    /// Exponents of `Vol(A_1,A_2,A_3)`, `∏ V(A_i^3)` and `∏ V(A_i^2,A_j)`.
    pub exponents: [i64; 3],
    #[serde(with = "serde_rational")]
    pub mixed_123: Rational,
    #[serde(with = "serde_rational")]
    pub pure_product: Rational,
    #[serde(with = "serde_rational")]
    pub pair_product: Rational,
    #[serde(with = "serde_rational")]
    pub lhs: Rational,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
    pub holds: bool,
    pub equality: bool,
    /// The same instance through the general logarithmic verifier.
    pub part2: Part2Report,
    /// The exact verdict and the certified verdict do not contradict.
    pub agrees: bool,
}

impl ExponentReport {
    pub fn passed(&self) -> bool {
        self.holds && self.part2.passed() && self.agrees
    }
}

pub fn verify_exponent_example(bodies: &[RationalPolytope], a: i64, b: i64, c: i64) -> Result<ExponentReport> {
    if bodies.len() != 3 || bodies.iter().any(|x| x.dim() != 3) {
        return Err(Error::Domain("the exponent example needs three bodies in R^3".into()));
    }
    if !(a >= b && b >= c && c >= 0) {
        return Err(Error::Domain(format!("need a >= b >= c >= 0, got {a}, {b}, {c}")));
    }
    let spec = MixFunctionSpec::bodies(3, bodies.to_vec())?;
    let table = spec.outer_table()?;
    if let Some((k, v)) = table.entries().find(|(_, v)| !v.is_positive()) {
        return Err(Error::Domain(format!("mixed volume V{k} = {v} is not positive")));
    }
    let v = |k: [u32; 3]| table.get(&k).cloned();
    let mixed_123 = v([1, 1, 1])?;
    let pure_product = v([3, 0, 0])? * v([0, 3, 0])? * v([0, 0, 3])?;
    let mut pair_product = Rational::one();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                let mut k = [0u32; 3];
                k[i] = 2;
                k[j] = 1;
                pair_product *= v(k)?;
            }
        }
    }
    let exponents = [3 * a + 6 * b - 9 * c, 7 * a - 6 * b - c, 4 * b - 3 * a - c];
    // Left: mixed_123^{e0}; right: pure^{e1}·pair^{e2}.
    let mut lhs = Rational::one();
    let mut rhs = Rational::one();
    for (base, e, on_left) in [
        (&mixed_123, exponents[0], true),
        (&pure_product, exponents[1], false),
        (&pair_product, exponents[2], false),
    ] {
        let p = arith::pow(base, e.abs());
        if (e >= 0) == on_left {
            lhs *= p;
        } else {
            rhs *= p;
        }
    }
    let lattice = Arc::new(CompositionLattice::new(3, 3)?);
    let classes: BTreeMap<String, String> = [("3,0,0", a), ("2,1,0", b), ("1,1,1", c)]
        .into_iter()
        .map(|(k, x)| (k.to_string(), x.to_string()))
        .collect();
    let cf = invariant_function_from_classes(lattice, &classes)?;
    let part2 = verify_corollary_part2(&spec, &cf, true)?;
    let holds = lhs >= rhs;
    let equality = lhs == rhs;
    let agrees = match part2.status {
        GeometricStatus::Equal => equality,
        GeometricStatus::Strict => !equality,
        GeometricStatus::Indeterminate => true,
        GeometricStatus::Violated => false,
    };
    Ok(ExponentReport {
        a,
        b,
        c,
        exponents,
        mixed_123,
        pure_product,
        pair_product,
        holds,
        equality,
        lhs,
        rhs,
        part2,
        agrees,
    })
}

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, rat_from_biguint, serde_rational, shifted_multinomial, Rational};
use crate::error::{Error, Result};
use crate::interval::{self, CertifiedSign, Interval};
use crate::lattice::{Composition, CompositionLattice};

use super::{enumerate_filters, gap, LatticeFunction, Monotonicity};

/// Declared monotonicity pattern of `(f, g)` for [`verify_fkg`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    IncreasingIncreasing,
    IncreasingDecreasing,
}

#[derive(Clone, Debug, Serialize)]
pub struct FkgReport {
    pub n: u32,
    pub r: usize,
    pub direction: Direction,
    #[serde(with = "serde_rational")]
    pub av_f: Rational,
    #[serde(with = "serde_rational")]
    pub av_g: Rational,
    #[serde(with = "serde_rational")]
    pub av_fg: Rational,
    /// `Av(fg) - Av(f)Av(g)`.
    #[serde(with = "serde_rational")]
    pub gap: Rational,
    pub holds: bool,
    pub equality: bool,
    /// `f` constant or the symmetrization of `g` constant.
    pub equality_condition: bool,
    pub consistent: bool,
}

impl FkgReport {
    pub fn passed(&self) -> bool {
        self.holds && self.consistent
    }
}

/// Checks the averaging inequality for an invariant non-decreasing `f` and a
/// `g` monotone in the declared direction.
pub fn verify_fkg(f: &LatticeFunction, g: &LatticeFunction, direction: Direction) -> Result<FkgReport> {
    if let Some((a, b)) = f.invariance_witness() {
        return Err(Error::Precondition(format!(
            "f is not invariant: f{a} = {} but f{b} = {}",
            f.value(&a)?,
            f.value(&b)?
        )));
    }
    if let Some((u, l)) = f.monotonicity_witness(true) {
        return Err(Error::Precondition(format!("f is not non-decreasing: f{u} < f{l}")));
    }
    let increasing = direction == Direction::IncreasingIncreasing;
    if let Some((u, l)) = g.monotonicity_witness(increasing) {
        let word = if increasing { "non-decreasing" } else { "non-increasing" };
        return Err(Error::Precondition(format!("g is not {word} on cover {u} ⋗ {l}")));
    }
    let av_f = f.average();
    let av_g = g.average();
    let av_fg = f.product(g)?.average();
    let gap = &av_fg - &av_f * &av_g;
    let holds = if increasing { !gap.is_negative() } else { !gap.is_positive() };
    let equality = gap.is_zero();
    let equality_condition = f.is_constant() || g.symmetrize().is_constant();
    Ok(FkgReport {
        n: f.lattice().n(),
        r: f.lattice().r(),
        direction,
        av_f,
        av_g,
        av_fg,
        gap,
        holds,
        equality,
        equality_condition,
        consistent: equality == equality_condition,
    })
}

/// Correlation of an invariant function with the symmetrization of another,
/// with the sign predicted from their detected monotonicity.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelationReport {
    pub n: u32,
    pub r: usize,
    pub invariant_direction: Monotonicity,
    pub symmetrized_direction: Monotonicity,
    #[serde(with = "serde_rational")]
    pub av_invariant: Rational,
    #[serde(with = "serde_rational")]
    pub av_other: Rational,
    #[serde(with = "serde_rational")]
    pub av_product: Rational,
    #[serde(with = "serde_rational")]
    pub gap: Rational,
    /// `+1`: gap >= 0 predicted; `-1`: gap <= 0 predicted; `0`: equality predicted.
    pub predicted_sign: i8,
    pub holds: bool,
    pub equality: bool,
    pub equality_condition: bool,
    pub consistent: bool,
}

impl CorrelationReport {
    pub fn passed(&self) -> bool {
        self.holds && self.consistent
    }
}

/// Correlates an invariant `f` with `g` through `[g]`, the orbit average.
/// Both `f` and `[g]` must be monotone (either direction).
pub fn correlate(invariant: &LatticeFunction, other: &LatticeFunction) -> Result<CorrelationReport> {
    if let Some((a, b)) = invariant.invariance_witness() {
        return Err(Error::Precondition(format!("function is not invariant: differs on {a} and {b}")));
    }
    let sym = other.symmetrize();
    let dir_f = invariant.monotonicity();
    let dir_g = sym.monotonicity();
    let sign_f = dir_f.sign().ok_or_else(|| {
        let (u, l) = invariant.monotonicity_witness(true).expect("non-monotone has a witness");
        Error::Precondition(format!("invariant function is not monotone (cover {u} ⋗ {l})"))
    })?;
    let sign_g = dir_g.sign().ok_or_else(|| {
        let (u, l) = sym.monotonicity_witness(true).expect("non-monotone has a witness");
        Error::Precondition(format!("symmetrization is not monotone (cover {u} ⋗ {l})"))
    })?;
    let av_invariant = invariant.average();
    let av_other = other.average();
    let av_product = invariant.product(other)?.average();
    let gap = &av_product - &av_invariant * &av_other;
    let predicted_sign = sign_f * sign_g;
    let holds = match predicted_sign {
        1 => !gap.is_negative(),
        -1 => !gap.is_positive(),
        _ => gap.is_zero(),
    };
    let equality = gap.is_zero();
    let equality_condition = invariant.is_constant() || sym.is_constant();
    Ok(CorrelationReport {
        n: invariant.lattice().n(),
        r: invariant.lattice().r(),
        invariant_direction: dir_f,
        symmetrized_direction: dir_g,
        av_invariant,
        av_other,
        av_product,
        gap,
        predicted_sign,
        holds,
        equality,
        equality_condition,
        consistent: equality == equality_condition,
    })
}

/// Pushforward form: `f` invariant, `[f]` and `[g]` monotone.
pub fn verify_pushforward_corollary(f: &LatticeFunction, g: &LatticeFunction) -> Result<CorrelationReport> {
    correlate(f, g)
}

/// `f(k) = ∏ d_i^{k_i}` (with `d` sorted descending) and
/// `g(k) = multinomial(n + r; k_1 + 1, …, k_r + 1)`.
///
/// `g` is invariant and `f` is not; the averaging inequality applies to the
/// pair through the symmetrization of `f`.
pub fn fkg_homogeneous_pair(
    lattice: Arc<CompositionLattice>,
    d: &[Rational],
) -> Result<(LatticeFunction, LatticeFunction)> {
    if d.len() != lattice.r() {
        return Err(Error::Domain(format!("expected {} weights, found {}", lattice.r(), d.len())));
    }
    if d.iter().any(|x| !x.is_positive()) {
        return Err(Error::Domain("weights must be positive".into()));
    }
    let mut d = d.to_vec();
    d.sort_by(|a, b| b.cmp(a));
    let f = LatticeFunction::from_fn(lattice.clone(), |k| {
        k.parts()
            .iter()
            .zip(&d)
            .map(|(&p, di)| arith::pow(di, p as i64))
            .product()
    })?;
    let g = LatticeFunction::from_fn(lattice, |k| rat_from_biguint(shifted_multinomial(k.parts())))?;
    Ok((f, g))
}

#[derive(Clone, Debug, Serialize)]
pub struct HomogeneousReport {
    pub correlation: CorrelationReport,
    /// `(Σ g)(Σ f)`.
    #[serde(with = "serde_rational")]
    pub lhs: Rational,
    /// `|K| Σ g f`.
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
    pub strict: bool,
}

/// The homogeneous instance `(Σ g)(Σ f) ≥ |K| Σ g·f`; the direction is taken
/// from the detected monotonicity, not assumed.
pub fn verify_homogeneous_pair(lattice: Arc<CompositionLattice>, d: &[Rational]) -> Result<HomogeneousReport> {
    let (f, g) = fkg_homogeneous_pair(lattice.clone(), d)?;
    let correlation = correlate(&g, &f)?;
    let sum_f: Rational = f.values().iter().sum();
    let sum_g: Rational = g.values().iter().sum();
    let sum_fg: Rational = f.product(&g)?.values().iter().sum();
    let lhs = sum_g * sum_f;
    let rhs = Rational::from_integer(BigInt::from(lattice.len())) * sum_fg;
    Ok(HomogeneousReport { strict: lhs != rhs, lhs, rhs, correlation })
}

/// A filter pair with its counts; filters are listed by their class
/// representatives.
#[derive(Clone, Debug, Serialize)]
pub struct PairWitness {
    pub x: Vec<Composition>,
    pub y: Vec<Composition>,
    pub size_x: u64,
    pub size_y: u64,
    pub size_xy: u64,
    /// `|K|·|X∩Y| - |X|·|Y|`.
    pub gap: i128,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExhaustiveReport {
    pub n: u32,
    pub r: usize,
    pub lattice_size: u64,
    pub quotient_size: usize,
    pub filters: usize,
    pub pairs: u64,
    pub violations: u64,
    pub equalities: u64,
    pub equality_mismatches: u64,
    /// Smallest gap over pairs of nontrivial filters.
    pub worst: Option<PairWitness>,
    pub first_failure: Option<PairWitness>,
}

impl ExhaustiveReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.equality_mismatches == 0
    }
}

#[derive(Default)]
struct PartialScan {
    pairs: u64,
    violations: u64,
    equalities: u64,
    mismatches: u64,
    worst: Option<(i128, usize, usize)>,
    first_failure: Option<(usize, usize)>,
}

/// Checks `|X|·|Y| ≤ |K|·|X∩Y|` for every ordered pair of invariant
/// up-sets, with equality exactly when one of them is trivial.
pub fn verify_fkg_exhaustive(lattice: &CompositionLattice, filter_cap: usize) -> Result<ExhaustiveReport> {
    let q = lattice.quotient();
    let filters = enumerate_filters(&q, filter_cap)?;
    let weights = q.orbit_sizes().to_vec();
    let total = lattice.len() as u64;
    let sizes: Vec<u64> = filters
        .iter()
        .map(|f| f.iter().map(|c| weights[c]).sum())
        .collect();
    let trivial: Vec<bool> = sizes.iter().map(|&s| s == 0 || s == total).collect();

    let partials: Vec<PartialScan> = (0..filters.len())
        .into_par_iter()
        .map(|x| {
            let mut p = PartialScan::default();
            for y in 0..filters.len() {
                let inter = filters[x].weighted_intersection(&filters[y], &weights);
                let gap = total as i128 * inter as i128 - sizes[x] as i128 * sizes[y] as i128;
                p.pairs += 1;
                let expect_equal = trivial[x] || trivial[y];
                let failed = if gap < 0 {
                    p.violations += 1;
                    true
                } else if (gap == 0) != expect_equal {
                    p.mismatches += 1;
                    true
                } else {
                    false
                };
                if gap == 0 {
                    p.equalities += 1;
                }
                if failed && p.first_failure.is_none() {
                    p.first_failure = Some((x, y));
                }
                if !expect_equal && p.worst.is_none_or(|(g, _, _)| gap < g) {
                    p.worst = Some((gap, x, y));
                }
            }
            p
        })
        .collect();

    let mut acc = PartialScan::default();
    for p in partials {
        acc.pairs += p.pairs;
        acc.violations += p.violations;
        acc.equalities += p.equalities;
        acc.mismatches += p.mismatches;
        if let Some(w) = p.worst {
            if acc.worst.is_none_or(|a| w.0 < a.0) {
                acc.worst = Some(w);
            }
        }
        if acc.first_failure.is_none() {
            acc.first_failure = p.first_failure;
        }
    }
    let witness = |x: usize, y: usize| {
        let reps = |f: usize| filters[f].iter().map(|c| q.class(c).clone()).collect();
        let inter = filters[x].weighted_intersection(&filters[y], &weights);
        PairWitness {
            x: reps(x),
            y: reps(y),
            size_x: sizes[x],
            size_y: sizes[y],
            size_xy: inter,
            gap: total as i128 * inter as i128 - sizes[x] as i128 * sizes[y] as i128,
        }
    };
    Ok(ExhaustiveReport {
        n: lattice.n(),
        r: lattice.r(),
        lattice_size: total,
        quotient_size: q.len(),
        filters: filters.len(),
        pairs: acc.pairs,
        violations: acc.violations,
        equalities: acc.equalities,
        equality_mismatches: acc.mismatches,
        worst: acc.worst.map(|(_, x, y)| witness(x, y)),
        first_failure: acc.first_failure.map(|(x, y)| witness(x, y)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometricStatus {
    /// The log gap is certified to have the predicted strict sign.
    Strict,
    /// Equality holds by the symbolic condition.
    Equal,
    /// The enclosure contains zero and no symbolic equality applies.
    Indeterminate,
    /// The log gap is certified to have the wrong sign.
    Violated,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeometricReport {
    pub n: u32,
    pub r: usize,
    #[serde(with = "serde_rational")]
    pub av_exponent: Rational,
    /// Enclosure of `Av(g·ln f) - Av(g)·Av(ln f)`.
    pub log_gap_lo: f64,
    pub log_gap_hi: f64,
    pub precision_bits: u32,
    /// `+1` when the log gap is predicted `>= 0`, `-1` when `<= 0`.
    pub predicted_sign: i8,
    pub symbolic_equality: bool,
    pub status: GeometricStatus,
    pub consistent: bool,
}

impl GeometricReport {
    pub fn passed(&self) -> bool {
        self.consistent && self.status != GeometricStatus::Violated
    }
}

/// Certified enclosure of `Av(g·ln f) - Av(g)·Av(ln f)`.
pub(crate) fn log_gap_certified(
    base: &LatticeFunction,
    exponent: &LatticeFunction,
    start: u32,
) -> Result<(CertifiedSign, Interval, u32)> {
    let len = Rational::from_integer(BigInt::from(base.values().len()));
    let av = exponent.average();
    let terms: Vec<(Rational, Rational)> = exponent
        .values()
        .iter()
        .zip(base.values())
        .map(|(e, b)| ((e - &av) / &len, b.clone()))
        .collect();
    interval::certify_sign(start, |p| interval::weighted_log_sum(&terms, p))
}

/// Whether the orbit averages of `ln f` are all equal, decided exactly by
/// comparing `(∏_O f)^{L/|O|}` with `L` the lcm of orbit sizes.
pub(crate) fn log_symmetrization_constant(f: &LatticeFunction) -> bool {
    let lat = f.lattice();
    let l = lat.orbits().iter().fold(1usize, |acc, o| acc.lcm(&o.len()));
    let mut reference: Option<Rational> = None;
    for orbit in lat.orbits() {
        let prod: Rational = orbit.iter().map(|&i| f.value_at(i).clone()).product();
        let powered = arith::pow(&prod, (l / orbit.len()) as i64);
        match &reference {
            None => reference = Some(powered),
            Some(r) if *r != powered => return false,
            _ => {}
        }
    }
    true
}

/// Classifies a certified log gap against the predicted sign and the
/// symbolic equality condition.
pub(crate) fn classify_log_gap(sign: &CertifiedSign, predicted: i8, symbolic_equality: bool) -> (GeometricStatus, bool) {
    let status = match (sign, symbolic_equality) {
        (_, true) => GeometricStatus::Equal,
        (CertifiedSign::Positive, false) if predicted >= 0 => GeometricStatus::Strict,
        (CertifiedSign::Negative, false) if predicted <= 0 => GeometricStatus::Strict,
        (CertifiedSign::Indeterminate, false) => GeometricStatus::Indeterminate,
        _ => GeometricStatus::Violated,
    };
    // Symbolic equality must leave zero inside the enclosure.
    let consistent = !symbolic_equality || *sign == CertifiedSign::Indeterminate;
    (status, consistent)
}

/// Geometric-average form: with `f >= 1` and `g >= 0` non-decreasing and at
/// least one of them invariant, `(Av^G f)^{Av g} ≤ Av^G(f^g)`, checked as
/// `Av(g)·Av(ln f) ≤ Av(g·ln f)` in certified arithmetic.
pub fn verify_geometric_corollary(f: &LatticeFunction, g: &LatticeFunction) -> Result<GeometricReport> {
    if let Some(i) = f.values().iter().position(|v| v < &Rational::one()) {
        return Err(Error::Domain(format!(
            "f must be >= 1; f{} = {}",
            f.lattice().element(i),
            f.value_at(i)
        )));
    }
    if let Some((u, l)) = f.monotonicity_witness(true) {
        return Err(Error::Precondition(format!("f is not non-decreasing on cover {u} ⋗ {l}")));
    }
    if let Some((u, l)) = g.monotonicity_witness(true) {
        return Err(Error::Precondition(format!("g is not non-decreasing on cover {u} ⋗ {l}")));
    }
    let (f_inv, g_inv) = (f.is_invariant(), g.is_invariant());
    if !f_inv && !g_inv {
        return Err(Error::Precondition("neither f nor g is invariant".into()));
    }
    let symbolic_equality = if f_inv {
        f.is_constant() || g.symmetrize().is_constant()
    } else {
        g.is_constant() || log_symmetrization_constant(f)
    };
    let (sign, iv, prec) = log_gap_certified(f, g, interval::START_PRECISION)?;
    let (status, consistent) = classify_log_gap(&sign, 1, symbolic_equality);
    Ok(GeometricReport {
        n: f.lattice().n(),
        r: f.lattice().r(),
        av_exponent: g.average(),
        log_gap_lo: arith::to_f64(iv.lo()),
        log_gap_hi: arith::to_f64(iv.hi()),
        precision_bits: prec,
        predicted_sign: 1,
        symbolic_equality,
        status,
        consistent,
    })
}

/// Raw gap without hypotheses, exposed for diagnostics.
pub fn raw_gap(f: &LatticeFunction, g: &LatticeFunction) -> Result<Rational> {
    gap(f, g)
}

//! Zero-count strata `K^s(n, r)` and the counting identities relating an
//! invariant up-set's stratum averages across lattices of different size.

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::{binom, from_bigint, serde_rational, serde_rational_vec, Rational};
use crate::error::{Error, Result};
use crate::lattice::{compositions, stratum_size, Composition, CompositionLattice};

use super::{enumerate_filters, UpSet};

/// Stratum averages `β_s = |X ∩ K^s| / |K^s|` and weights `γ_s = |K^s|` of
/// an invariant up-set, for the non-empty strata `s` in increasing order.
#[derive(Clone, Debug, Serialize)]
pub struct StrataProfile {
    pub n: u32,
    pub r: usize,
    pub strata: Vec<usize>,
    #[serde(with = "serde_rational_vec")]
    pub beta: Vec<Rational>,
    pub gamma: Vec<u64>,
    /// `α_s` for `2 <= r <= n`, otherwise empty.
    #[serde(with = "serde_rational_vec")]
    pub alpha: Vec<Rational>,
    pub chain_holds: bool,
    pub all_equal: bool,
    pub trivial: bool,
}

impl StrataProfile {
    /// The chain is non-decreasing, and all averages agree only for trivial sets.
    pub fn passed(&self) -> bool {
        let degenerate = self.strata.len() < 2;
        self.chain_holds && (degenerate || self.all_equal == self.trivial)
    }
}

fn rat_u(v: usize) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn strata_averages(x: &UpSet) -> Result<StrataProfile> {
    let lat = x.lattice();
    let (n, r) = (lat.n(), lat.r());
    let top = if n == 0 { r } else { r - 1 };
    let mut strata = Vec::new();
    let mut beta = Vec::new();
    let mut gamma = Vec::new();
    for s in 0..=top {
        let idx = lat.stratum_indices(s)?;
        if idx.is_empty() {
            continue;
        }
        let inside = idx.iter().filter(|&&i| x.contains(i)).count();
        strata.push(s);
        beta.push(Rational::new(BigInt::from(inside), BigInt::from(idx.len())));
        gamma.push(idx.len() as u64);
    }
    let chain_holds = beta.windows(2).all(|w| w[0] <= w[1]);
    let all_equal = beta.windows(2).all(|w| w[0] == w[1]);
    let alpha = if r >= 2 && n as usize >= r { alpha_coefficients(n, r)? } else { Vec::new() };
    Ok(StrataProfile { n, r, strata, beta, gamma, alpha, chain_holds, all_equal, trivial: x.is_trivial() })
}

fn check_alpha_range(n: u32, r: usize) -> Result<()> {
    if r < 2 || (n as usize) < r {
        return Err(Error::Domain(format!("alpha coefficients need 2 <= r <= n, got n={n}, r={r}")));
    }
    Ok(())
}

fn alpha_denominator(n: u32, r: usize) -> BigInt {
    binom(n as i64 - 2, r as i64 - 2) * BigInt::from(n - 1)
}

/// `α_s = binom(n-r, r-s-1)·(n·binom(r-1, s-1) - (r-1)·binom(r, s)) /
/// (binom(n-2, r-2)·(n-1))` for `s = 0..r`.
pub fn alpha_coefficients(n: u32, r: usize) -> Result<Vec<Rational>> {
    check_alpha_range(n, r)?;
    let (n, r) = (n as i64, r as i64);
    let den = alpha_denominator(n as u32, r as usize);
    Ok((0..r)
        .map(|s| {
            let num = binom(n - r, r - s - 1)
                * (BigInt::from(n) * binom(r - 1, s - 1) - BigInt::from(r - 1) * binom(r, s));
            Rational::new(num, den.clone())
        })
        .collect())
}

/// `α_s` from its defining expression
/// `(s/|K^1(n,r)| - ((r-s)/r)/|K^0(n,r)|)·|K^s(n-r+1, r)|`.
pub fn alpha_coefficients_from_counts(n: u32, r: usize) -> Result<Vec<Rational>> {
    check_alpha_range(n, r)?;
    let k1 = from_bigint(stratum_size(n, r, 1));
    let k0 = from_bigint(stratum_size(n, r, 0));
    let rr = rat_u(r);
    Ok((0..r)
        .map(|s| {
            let sub = from_bigint(stratum_size(n - r as u32 + 1, r, s));
            (rat_u(s) / &k1 - rat_u(r - s) / &rr / &k0) * sub
        })
        .collect())
}

/// `Σ_{s=k}^{r-1} α_s = binom(n-r, r-k)·binom(r-1, k)·k / (binom(n-2, r-2)·(n-1))`.
pub fn alpha_tail_closed_form(n: u32, r: usize, k: usize) -> Result<Rational> {
    check_alpha_range(n, r)?;
    let (ni, ri, ki) = (n as i64, r as i64, k as i64);
    let num = binom(ni - ri, ri - ki) * binom(ri - 1, ki) * BigInt::from(k);
    Ok(Rational::new(num, alpha_denominator(n, r)))
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaIdentities {
    pub n: u32,
    pub r: usize,
    #[serde(with = "serde_rational_vec")]
    pub alpha: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub tails: Vec<Rational>,
    /// Tail sums agree with the closed form for every `k`.
    pub tails_match: bool,
    /// The full sum (`k = 0`) is zero.
    pub total_zero: bool,
    /// Every tail is non-negative, which is what the stratum argument uses.
    pub tails_nonnegative: bool,
    /// Every tail with `k >= 1` is strictly positive. Fails whenever
    /// `n - r < r - k`, where the closed form vanishes.
    pub strictly_positive: bool,
    /// The closed formula agrees with the defining count expression.
    pub matches_counts: bool,
}

impl AlphaIdentities {
    pub fn passed(&self) -> bool {
        self.tails_match && self.total_zero && self.tails_nonnegative && self.matches_counts
    }
}

pub fn verify_alpha_identities(n: u32, r: usize) -> Result<AlphaIdentities> {
    let alpha = alpha_coefficients(n, r)?;
    let mut tails = vec![Rational::zero(); r];
    let mut acc = Rational::zero();
    for s in (0..r).rev() {
        acc += &alpha[s];
        tails[s] = acc.clone();
    }
    let mut tails_match = true;
    for (k, t) in tails.iter().enumerate() {
        tails_match &= *t == alpha_tail_closed_form(n, r, k)?;
    }
    let total_zero = tails[0].is_zero();
    let tails_nonnegative = tails.iter().all(|t| !t.is_negative());
    let strictly_positive = tails[1..].iter().all(|t| t.is_positive());
    let matches_counts = alpha == alpha_coefficients_from_counts(n, r)?;
    Ok(AlphaIdentities { n, r, alpha, tails, tails_match, total_zero, tails_nonnegative, strictly_positive, matches_counts })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChebyshevReport {
    /// `(Σ γα)(Σ γβ)`.
    #[serde(with = "serde_rational")]
    pub lhs: Rational,
    /// `(Σ γ)(Σ γαβ)`.
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
    /// `rhs - lhs`.
    #[serde(with = "serde_rational")]
    pub gap: Rational,
    /// `½ Σ_{s,t} γ_s γ_t (α_s - α_t)(β_s - β_t)`.
    #[serde(with = "serde_rational")]
    pub double_sum: Rational,
    pub holds: bool,
    pub consistent: bool,
}

/// Weighted Chebyshev sum inequality for similarly sorted `α`, `β` and
/// positive weights `γ`.
pub fn chebyshev_weighted(alpha: &[Rational], beta: &[Rational], gamma: &[Rational]) -> Result<ChebyshevReport> {
    if alpha.len() != beta.len() || alpha.len() != gamma.len() {
        return Err(Error::DimensionMismatch { expected: alpha.len(), found: beta.len().max(gamma.len()) });
    }
    if !alpha.windows(2).all(|w| w[0] <= w[1]) || !beta.windows(2).all(|w| w[0] <= w[1]) {
        return Err(Error::Precondition("alpha and beta must be sorted non-decreasing".into()));
    }
    if gamma.iter().any(|g| !g.is_positive()) {
        return Err(Error::Domain("weights must be positive".into()));
    }
    let sum = |it: &mut dyn Iterator<Item = Rational>| it.fold(Rational::zero(), |a, b| a + b);
    let sg = sum(&mut gamma.iter().cloned());
    let sga = sum(&mut gamma.iter().zip(alpha).map(|(g, a)| g * a));
    let sgb = sum(&mut gamma.iter().zip(beta).map(|(g, b)| g * b));
    let sgab = sum(&mut gamma.iter().zip(alpha).zip(beta).map(|((g, a), b)| g * a * b));
    let lhs = sga * sgb;
    let rhs = sg * sgab;
    let gap = &rhs - &lhs;
    let mut double = Rational::zero();
    for s in 0..alpha.len() {
        for t in 0..alpha.len() {
            double += &gamma[s] * &gamma[t] * (&alpha[s] - &alpha[t]) * (&beta[s] - &beta[t]);
        }
    }
    let double_sum = double / Rational::from_integer(BigInt::from(2));
    Ok(ChebyshevReport { holds: lhs <= rhs, consistent: gap == double_sum, lhs, rhs, gap, double_sum })
}

fn member_set(x: &UpSet) -> HashSet<&Composition> {
    x.members().iter().map(|i| x.lattice().element(i)).collect()
}

/// One step of the recursion between consecutive stratum averages.
#[derive(Clone, Debug, Serialize)]
pub struct StrataRecursionCheck {
    pub s: usize,
    /// `β_s - β_{s-1}` on `K(n, r)`.
    #[serde(with = "serde_rational")]
    pub difference: Rational,
    /// `Av_{K^1(n, r+1-s)} X' - Av_{K^0(n, r+1-s)} X'` with
    /// `X' = {m : (m, 0^{s-1}) ∈ X}`.
    #[serde(with = "serde_rational")]
    pub sub_difference: Rational,
    #[serde(with = "serde_rational")]
    pub coefficient: Rational,
    pub coefficients_agree: bool,
    pub identity_holds: bool,
}

/// `β_s - β_{s-1} = binom(r,s)/(r+1-s)·|K^1(n,r+1-s)|/|K^s(n,r)|·(sub difference)`
/// for every `s >= 1` whose strata are non-empty, with both expressions of the
/// coefficient compared exactly.
pub fn strata_recursion_check(x: &UpSet) -> Result<Vec<StrataRecursionCheck>> {
    let lat = x.lattice();
    let (n, r) = (lat.n(), lat.r());
    let members = member_set(x);
    let beta = |s: usize| -> Result<Rational> {
        let idx = lat.stratum_indices(s)?;
        let inside = idx.iter().filter(|&&i| x.contains(i)).count();
        Ok(Rational::new(BigInt::from(inside), BigInt::from(idx.len())))
    };
    let mut out = Vec::new();
    for s in 1..r {
        if stratum_size(n, r, s - 1).is_zero() {
            continue;
        }
        let sub_r = r + 1 - s;
        // Stratum counts of X' on K(n, sub_r).
        let (mut in0, mut in1) = (0usize, 0usize);
        for m in compositions(n, sub_r) {
            let z = m.zero_count();
            if z > 1 {
                continue;
            }
            let mut padded = m.parts().to_vec();
            padded.resize(r, 0);
            if members.contains(&Composition::new(padded)?) {
                if z == 0 {
                    in0 += 1;
                } else {
                    in1 += 1;
                }
            }
        }
        let k0 = from_bigint(stratum_size(n, sub_r, 0));
        let k1 = from_bigint(stratum_size(n, sub_r, 1));
        let sub_difference = rat_u(in1) / &k1 - rat_u(in0) / &k0;
        let ks = from_bigint(stratum_size(n, r, s));
        let ks1 = from_bigint(stratum_size(n, r, s - 1));
        let coefficient = from_bigint(binom(r as i64, s as i64)) / rat_u(sub_r) * &k1 / &ks;
        let other = from_bigint(binom(r as i64, s as i64 - 1)) * &k0 / &ks1;
        let difference = beta(s)? - beta(s - 1)?;
        out.push(StrataRecursionCheck {
            s,
            identity_holds: difference == &coefficient * &sub_difference,
            coefficients_agree: coefficient == other,
            difference,
            sub_difference,
            coefficient,
        });
    }
    Ok(out)
}

/// Counts relating `X ∩ K^1(n, r)` and `X ∩ K^0(n, r)` to compositions of
/// `n - r + 1`.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionCounts {
    pub k1: u64,
    pub k0: u64,
    /// `Σ_s s·|X' ∩ K^s(n-r+1, r)|`, where `p ∈ X'` iff `p + 1 - e_j ∈ X`
    /// for a zero position `j` of `p`.
    pub first_reduction: u64,
    /// `Σ_j #{m : m_j > 0, m + 1 - e_j ∈ X}`, which should be `r·k0`.
    pub second_resolved: u64,
    /// `(1/r)·Σ_s (r-s)·|X'' ∩ K^s(n-r+1, r)|` with `m ∈ X''` iff
    /// `m + 1 - e_j ∈ X` for some `j`.
    #[serde(with = "serde_rational")]
    pub second_aggregated: Rational,
    pub first_holds: bool,
    pub second_resolved_holds: bool,
    pub second_aggregated_holds: bool,
}

/// `m + 1 - e_j`.
fn shift_up_except(m: &Composition, j: usize) -> Result<Composition> {
    let parts = m
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &p)| if i == j { p } else { p + 1 })
        .collect();
    Composition::new(parts)
}

pub fn decomposition_counts(x: &UpSet) -> Result<DecompositionCounts> {
    let lat = x.lattice();
    let (n, r) = (lat.n(), lat.r());
    if r < 2 || (n as usize) + 1 < r {
        return Err(Error::Domain(format!("decomposition counts need r >= 2 and n >= r - 1, got n={n}, r={r}")));
    }
    let members = member_set(x);
    let count_stratum = |s: usize| -> Result<u64> {
        Ok(lat.stratum_indices(s)?.iter().filter(|&&i| x.contains(i)).count() as u64)
    };
    let k1 = count_stratum(1)?;
    let k0 = count_stratum(0)?;
    let sub_n = n + 1 - r as u32;
    let mut first = 0u64;
    let mut resolved = 0u64;
    let mut aggregated = vec![0u64; r + 1];
    for m in compositions(sub_n, r) {
        let zeros: Vec<usize> = (0..r).filter(|&j| m.parts()[j] == 0).collect();
        if let Some(&j) = zeros.first() {
            let k = shift_up_except(&m, j)?;
            if members.contains(&k) {
                first += zeros.len() as u64;
            }
        }
        let mut any = false;
        for j in 0..r {
            let k = shift_up_except(&m, j)?;
            let hit = members.contains(&k);
            any |= hit;
            if hit && m.parts()[j] > 0 {
                resolved += 1;
            }
        }
        if any {
            aggregated[zeros.len()] += 1;
        }
    }
    let second_aggregated = aggregated
        .iter()
        .enumerate()
        .map(|(s, &c)| rat_u(r.saturating_sub(s)) * rat_u(c as usize))
        .fold(Rational::zero(), |a, b| a + b)
        / rat_u(r);
    Ok(DecompositionCounts {
        k1,
        k0,
        first_reduction: first,
        second_resolved: resolved,
        first_holds: first == k1,
        second_resolved_holds: resolved == r as u64 * k0,
        second_aggregated_holds: second_aggregated == rat_u(k0 as usize),
        second_aggregated,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StrataExhaustiveReport {
    pub n: u32,
    pub r: usize,
    pub filters: usize,
    pub nontrivial: usize,
    pub chain_violations: usize,
    pub equality_mismatches: usize,
    pub recursion_failures: usize,
    pub decomposition_failures: usize,
    /// Class representatives of the first failing filter.
    pub first_failure: Option<Vec<Composition>>,
}

impl StrataExhaustiveReport {
    pub fn passed(&self) -> bool {
        self.chain_violations == 0
            && self.equality_mismatches == 0
            && self.recursion_failures == 0
            && self.decomposition_failures == 0
    }
}

/// Runs the stratum chain, the recursion identity and the decomposition
/// counts on every invariant up-set of the lattice.
pub fn verify_strata_exhaustive(lattice: Arc<CompositionLattice>, filter_cap: usize) -> Result<StrataExhaustiveReport> {
    let q = lattice.quotient();
    let filters = enumerate_filters(&q, filter_cap)?;
    let (n, r) = (lattice.n(), lattice.r());
    let with_counts = r >= 2 && n as usize + 1 >= r;
    let mut rep = StrataExhaustiveReport {
        n,
        r,
        filters: filters.len(),
        nontrivial: 0,
        chain_violations: 0,
        equality_mismatches: 0,
        recursion_failures: 0,
        decomposition_failures: 0,
        first_failure: None,
    };
    for f in &filters {
        let x = UpSet::from_filter(lattice.clone(), f)?;
        let profile = strata_averages(&x)?;
        let mut failed = false;
        if !x.is_trivial() {
            rep.nontrivial += 1;
        }
        if !profile.chain_holds {
            rep.chain_violations += 1;
            failed = true;
        } else if !profile.passed() {
            rep.equality_mismatches += 1;
            failed = true;
        }
        if strata_recursion_check(&x)?.iter().any(|c| !c.identity_holds || !c.coefficients_agree) {
            rep.recursion_failures += 1;
            failed = true;
        }
        if with_counts {
            let d = decomposition_counts(&x)?;
            if !d.first_holds || !d.second_resolved_holds {
                rep.decomposition_failures += 1;
                failed = true;
            }
        }
        if failed && rep.first_failure.is_none() {
            rep.first_failure = Some(f.iter().map(|c| q.class(c).clone()).collect());
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn lat(n: u32, r: usize) -> Arc<CompositionLattice> {
        Arc::new(CompositionLattice::new(n, r).unwrap())
    }

    #[test]
    fn trivial_profiles() {
        let l = lat(6, 3);
        let e = strata_averages(&UpSet::empty(l.clone())).unwrap();
        assert!(e.beta.iter().all(|b| b.is_zero()) && e.passed());
        let f = strata_averages(&UpSet::full(l)).unwrap();
        assert!(f.beta.iter().all(|b| *b == int(1)) && f.passed());
        assert_eq!(f.gamma, vec![10, 15, 3]);
    }

    #[test]
    fn alpha_for_6_3() {
        // Telescoped differences of the closed-form tails.
        let a = alpha_coefficients(6, 3).unwrap();
        for s in 0..3 {
            let next = if s + 1 < 3 { alpha_tail_closed_form(6, 3, s + 1).unwrap() } else { Rational::zero() };
            assert_eq!(a[s], alpha_tail_closed_form(6, 3, s).unwrap() - next);
        }
        assert_eq!(a, alpha_coefficients_from_counts(6, 3).unwrap());
        assert!(alpha_coefficients(3, 4).is_err());
    }

    #[test]
    fn chebyshev_examples() {
        let v = [int(1), int(2), int(3)];
        let ones = [int(1), int(1), int(1)];
        let rep = chebyshev_weighted(&v, &v, &ones).unwrap();
        assert_eq!((rep.lhs.clone(), rep.rhs.clone()), (int(36), int(42)));
        assert!(rep.holds && rep.consistent);
        let c = [rat(1, 2), rat(1, 2), rat(1, 2)];
        assert!(chebyshev_weighted(&c, &v, &ones).unwrap().gap.is_zero());
        assert!(chebyshev_weighted(&[int(2), int(1), int(3)], &v, &ones).is_err());
    }

    #[test]
    fn aggregated_second_reduction_counterexample() {
        let l = lat(4, 2);
        let x = UpSet::from_predicate(l.clone(), |i| l.element(i).sorted_desc().parts() == [4, 0]).unwrap();
        let d = decomposition_counts(&x).unwrap();
        assert!(d.first_holds && d.second_resolved_holds);
        assert!(!d.second_aggregated_holds);
        assert_eq!((d.k0, d.second_aggregated.clone()), (0, int(1)));
    }

    #[test]
    fn exhaustive_6_3() {
        let rep = verify_strata_exhaustive(lat(6, 3), 1000).unwrap();
        assert_eq!(rep.filters, 9);
        assert_eq!(rep.nontrivial, 7);
        assert!(rep.passed(), "{rep:?}");
    }
}

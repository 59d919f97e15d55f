//! Certified real intervals with rational endpoints, and outward-rounded
//! natural logarithms of positive rationals.
//!
//! `ln x` is reduced to `e·ln 2 + 2·atanh(y)` with `y ∈ [0, 1/3)` and the
//! series is summed in fixed point with floor/ceil rounding on the two
//! bounds, plus a geometric bound on the tail.

use std::cmp::Ordering;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};

/// Default starting precision in bits.
pub const START_PRECISION: u32 = 128;
/// Width (log space) below which an undecided sign is reported as indeterminate.
pub const EQUALITY_TOLERANCE_BITS: u32 = 64;
const MAX_PRECISION: u32 = 8192;
const GUARD_BITS: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval bounds out of order");
        Self { lo, hi }
    }

    pub fn point(v: Rational) -> Self {
        Self { lo: v.clone(), hi: v }
    }

    pub fn zero() -> Self {
        Self::point(Rational::zero())
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn scale(&self, k: &Rational) -> Interval {
        if k.is_negative() {
            Interval { lo: &self.hi * k, hi: &self.lo * k }
        } else {
            Interval { lo: &self.lo * k, hi: &self.hi * k }
        }
    }

    /// `Some(ordering of the value against 0)` when the interval excludes 0
    /// or is the point 0.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn midpoint_f64(&self) -> f64 {
        crate::arith::to_f64(&((&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2))))
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, o: &Interval) -> Interval {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }
}

fn div_floor(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Fixed-point bounds `[lo, hi]` (scaled by `2^p`) of `atanh(y)` for a
/// rational `0 <= y <= 1/3`.
fn atanh_fixed(y: &Rational, p: u32) -> (BigInt, BigInt) {
    let one = BigInt::one() << p;
    let scaled = y * Rational::from_integer(one.clone());
    let (y_lo, y_hi) = (scaled.floor().to_integer(), scaled.ceil().to_integer());
    let y2_lo = div_floor(&(&y_lo * &y_lo), &one);
    let y2_hi = div_ceil(&(&y_hi * &y_hi), &one);
    let (mut t_lo, mut t_hi) = (y_lo, y_hi);
    let (mut s_lo, mut s_hi) = (BigInt::zero(), BigInt::zero());
    let mut k: u64 = 0;
    loop {
        let d = BigInt::from(2 * k + 1);
        s_lo += div_floor(&t_lo, &d);
        s_hi += div_ceil(&t_hi, &d);
        t_lo = div_floor(&(&t_lo * &y2_lo), &one);
        t_hi = div_ceil(&(&t_hi * &y2_hi), &one);
        k += 1;
        if t_hi <= BigInt::one() {
            break;
        }
    }
    // Tail: sum of the remaining terms <= t_hi / (1 - y^2) <= 9/8 t_hi,
    // plus one unit per term of rounding slack already absorbed by the ceilings.
    s_hi += div_ceil(&(&t_hi * BigInt::from(9)), &BigInt::from(8)) + BigInt::one();
    (s_lo, s_hi)
}

fn ln2_fixed(p: u32) -> (BigInt, BigInt) {
    let (lo, hi) = atanh_fixed(&Rational::new(BigInt::one(), BigInt::from(3)), p);
    (lo * 2, hi * 2)
}

/// Certified enclosure of `ln x` whose width is at most about `2^-prec`
/// (times the binary exponent of `x`).
pub fn ln(x: &Rational, prec: u32) -> Result<Interval> {
    if !x.is_positive() {
        return Err(Error::Domain(format!("logarithm of non-positive value {x}")));
    }
    if x.is_one() {
        return Ok(Interval::zero());
    }
    let p = prec + GUARD_BITS;
    // x = 2^e · m with m in [1, 2).
    let mut e = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two = Rational::from_integer(BigInt::from(2));
    let mut m = x / crate::arith::pow(&two, e);
    if m < Rational::one() {
        m *= &two;
        e -= 1;
    }
    debug_assert!(m >= Rational::one() && m < two);
    let y = (&m - Rational::one()) / (&m + Rational::one());
    let (a_lo, a_hi) = atanh_fixed(&y, p);
    let (l_lo, l_hi) = ln2_fixed(p);
    let e_big = BigInt::from(e);
    let (el_lo, el_hi) = if e >= 0 {
        (&e_big * &l_lo, &e_big * &l_hi)
    } else {
        (&e_big * &l_hi, &e_big * &l_lo)
    };
    let denom = BigInt::one() << p;
    Ok(Interval::new(
        Rational::new(el_lo + a_lo * 2, denom.clone()),
        Rational::new(el_hi + a_hi * 2, denom),
    ))
}

/// Outcome of a sign certification in log space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertifiedSign {
    Positive,
    Negative,
    /// The enclosure still contains zero at the equality tolerance.
    Indeterminate,
}

/// Evaluates `eval(prec)` at doubling precision from `start` until the sign
/// is certain or the enclosure is narrower than `2^-64` around zero.
pub fn certify_sign<F>(start: u32, mut eval: F) -> Result<(CertifiedSign, Interval, u32)>
where
    F: FnMut(u32) -> Result<Interval>,
{
    let tol = Rational::new(BigInt::one(), BigInt::one() << EQUALITY_TOLERANCE_BITS);
    let mut prec = start.max(16);
    loop {
        let iv = eval(prec)?;
        match iv.sign() {
            Some(Ordering::Greater) => return Ok((CertifiedSign::Positive, iv, prec)),
            Some(Ordering::Less) => return Ok((CertifiedSign::Negative, iv, prec)),
            Some(Ordering::Equal) => return Ok((CertifiedSign::Indeterminate, iv, prec)),
            None => {
                if iv.width() < tol || prec >= MAX_PRECISION {
                    return Ok((CertifiedSign::Indeterminate, iv, prec));
                }
            }
        }
        prec *= 2;
    }
}

/// `Σ w_i ln(x_i)` as a certified interval.
pub fn weighted_log_sum(terms: &[(Rational, Rational)], prec: u32) -> Result<Interval> {
    let mut acc = Interval::zero();
    for (w, x) in terms {
        if w.is_zero() {
            continue;
        }
        acc = &acc + &ln(x, prec)?.scale(w);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, to_f64};

    #[test]
    fn ln_matches_f64() {
        for (p, q) in [(2, 1), (3, 1), (1, 3), (10, 7), (1_000_000, 3), (5, 1_000_000)] {
            let x = rat(p, q);
            let iv = ln(&x, 128).unwrap();
            let f = (p as f64 / q as f64).ln();
            assert!((to_f64(iv.lo()) - f).abs() < 1e-12, "{p}/{q}");
            assert!(iv.width() < rat(1, 1 << 40) * rat(1, 1 << 40) * rat(1, 1 << 40));
        }
    }

    #[test]
    fn ln_encloses_known_identities() {
        // ln 8 = 3 ln 2 exactly; the enclosures must overlap.
        let l8 = ln(&int(8), 96).unwrap();
        let l2 = ln(&int(2), 96).unwrap().scale(&int(3));
        assert!(l8.overlaps(&l2));
        // ln(a b) = ln a + ln b
        let a = rat(7, 5);
        let b = rat(11, 3);
        let lab = ln(&(&a * &b), 128).unwrap();
        let sum = &ln(&a, 128).unwrap() + &ln(&b, 128).unwrap();
        assert!(lab.overlaps(&sum));
        assert_eq!(ln(&int(1), 64).unwrap(), Interval::zero());
        assert!(ln(&int(0), 64).is_err());
    }

    #[test]
    fn certification() {
        let (s, _, _) = certify_sign(128, |p| weighted_log_sum(&[(int(1), int(3)), (int(-1), int(2))], p)).unwrap();
        assert_eq!(s, CertifiedSign::Positive);
        let (s, _, _) = certify_sign(128, |p| weighted_log_sum(&[(int(1), int(8)), (int(-3), int(2))], p)).unwrap();
        assert_eq!(s, CertifiedSign::Indeterminate);
    }
}

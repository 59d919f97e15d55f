//! Exact integer and rational helpers shared by every layer.
//!
//! All rationals are `num_rational::BigRational`. They cross the serialization
//! boundary as `"p/q"` strings (integers as `"p"`).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

pub fn from_bigint(p: BigInt) -> Rational {
    Rational::from_integer(p)
}

/// Binomial coefficient with the convention `binom(m, k) = 0` whenever
/// `k < 0` or `m < k`.
pub fn binom(m: i64, k: i64) -> BigInt {
    if k < 0 || m < k {
        return BigInt::zero();
    }
    // m >= k >= 0 here.
    let k = k.min(m - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= BigInt::from(m - i);
        acc /= BigInt::from(i + 1);
    }
    acc
}

pub fn binom_u64(m: i64, k: i64) -> u64 {
    binom(m, k).to_u64().expect("binomial exceeds u64")
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// `total! / prod(parts_i!)`; `total` must equal the sum of the parts.
pub fn multinomial(parts: &[u64]) -> BigUint {
    let total: u64 = parts.iter().sum();
    let mut acc = factorial(total);
    for &p in parts {
        acc /= factorial(p);
    }
    acc
}

/// `multinomial(n + r; k_1 + 1, ..., k_r + 1)` for a composition `k` of `n`.
pub fn shifted_multinomial(parts: &[u32]) -> BigUint {
    let shifted: Vec<u64> = parts.iter().map(|&p| p as u64 + 1).collect();
    multinomial(&shifted)
}

pub fn rat_from_biguint(v: BigUint) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn pow(base: &Rational, exp: i64) -> Rational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), (-exp) as usize)
    }
}

/// Exact `k`-th root of a non-negative rational, when it exists.
pub fn exact_root(v: &Rational, k: u32) -> Option<Rational> {
    if v.is_negative() {
        return None;
    }
    let num = v.numer().to_biguint()?;
    let den = v.denom().to_biguint()?;
    let rn = num.nth_root(k);
    let rd = den.nth_root(k);
    if num_traits::pow(rn.clone(), k as usize) == num
        && num_traits::pow(rd.clone(), k as usize) == den
    {
        Some(Rational::new(BigInt::from(rn), BigInt::from(rd)))
    } else {
        None
    }
}

pub fn format_rational(v: &Rational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad rational {s:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(parse_int(p)?, q))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn to_f64(v: &Rational) -> f64 {
    let n = v.numer().to_f64().unwrap_or(f64::NAN);
    let d = v.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        // Large operands: scale both down before dividing.
        let shift = v.numer().bits().max(v.denom().bits()).saturating_sub(1000);
        let n = (v.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (v.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    }
}

/// Serde adapter: a `Rational` as a `"p/q"` string.
pub mod serde_rational {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}

/// Serde adapter: `Vec<Rational>` as a list of `"p/q"` strings.
pub mod serde_rational_vec {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&format_rational(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(D::Error::custom))
            .collect()
    }
}

/// Serde adapter for `Option<Rational>`.
pub mod serde_rational_opt {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_some(&format_rational(x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let raw = Option::<String>::deserialize(d)?;
        raw.map(|s| parse_rational(&s).map_err(D::Error::custom))
            .transpose()
    }
}

/// Solves `A x = b` exactly by Gaussian elimination with row pivoting.
pub fn solve_linear(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Result<Vec<Rational>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::Domain("linear system must be square".into()));
    }
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::SingularSystem)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &inv;
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }
    let mut x = vec![Rational::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for c in row + 1..n {
            acc -= &a[row][c] * &x[c];
        }
        x[row] = acc / &a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binom_convention() {
        assert_eq!(binom(8, 6), BigInt::from(28));
        assert_eq!(binom(-1, -1), BigInt::zero());
        assert_eq!(binom(3, 5), BigInt::zero());
        assert_eq!(binom(5, 0), BigInt::one());
        assert_eq!(binom(0, 0), BigInt::one());
    }

    #[test]
    fn multinomial_small() {
        assert_eq!(multinomial(&[2, 1]), BigUint::from(3u32));
        // (4 + 3)! / (5! 1! 1!) = 42
        assert_eq!(shifted_multinomial(&[4, 0, 0]), BigUint::from(42u32));
    }

    #[test]
    fn rational_text_roundtrip() {
        for s in ["3/4", "-7/2", "5", "0"] {
            let v = parse_rational(s).unwrap();
            assert_eq!(format_rational(&v), s);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
    }

    #[test]
    fn exact_roots() {
        assert_eq!(exact_root(&int(8), 3), Some(int(2)));
        assert_eq!(exact_root(&rat(4, 9), 2), Some(rat(2, 3)));
        assert_eq!(exact_root(&int(2), 2), None);
    }
}

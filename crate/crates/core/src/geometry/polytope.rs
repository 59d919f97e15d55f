use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{format_rational, lcm_of_denominators, parse_rational, Rational};
use crate::error::{Error, Result};

use super::hull::{int_hull, IPoint};
use super::{check_dim, factorial_i};

pub type Point = Vec<Rational>;

/// A convex polytope in `R^N` (`N <= 3`) given by its vertices. Bodies of
/// lower affine dimension are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolytope {
    dim: usize,
    vertices: Vec<Point>,
    rank: usize,
    volume: Rational,
}

/// Scales rational points to integers by the lcm of all denominators.
fn to_integer_points(points: &[Point]) -> Result<(BigInt, Vec<IPoint>)> {
    let s = lcm_of_denominators(points.iter().flatten());
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let mut q = Vec::with_capacity(p.len());
        for c in p {
            let v = (c * Rational::from_integer(s.clone())).to_integer();
            q.push(v.to_i128().ok_or(Error::Overflow)?);
        }
        out.push(q);
    }
    Ok((s, out))
}

impl RationalPolytope {
    /// Convex hull of the given points.
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self> {
        check_dim(dim)?;
        if points.is_empty() {
            return Err(Error::Domain("a polytope needs at least one point".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
        }
        let (s, ipts) = to_integer_points(&points)?;
        let hull = int_hull(dim, &ipts)?;
        let sr = Rational::from_integer(s.clone());
        let mut vertices: Vec<Point> = hull
            .vertices
            .iter()
            .map(|v| v.iter().map(|&c| Rational::from_integer(BigInt::from(c)) / &sr).collect())
            .collect();
        vertices.sort();
        let denom = BigInt::from(factorial_i(dim)) * num_traits::pow(s, dim);
        let volume = Rational::new(BigInt::from(hull.scaled_volume), denom);
        Ok(Self { dim, vertices, rank: hull.rank, volume })
    }

    pub fn from_integers(dim: usize, points: &[Vec<i64>]) -> Result<Self> {
        let pts = points
            .iter()
            .map(|p| p.iter().map(|&c| Rational::from_integer(BigInt::from(c))).collect())
            .collect();
        Self::new(dim, pts)
    }

    /// The single point `{0}`.
    pub fn origin(dim: usize) -> Result<Self> {
        Self::new(dim, vec![vec![Rational::zero(); dim]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Hull-reduced vertices in lexicographic order.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Affine dimension.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.rank == self.dim
    }

    pub fn volume(&self) -> &Rational {
        &self.volume
    }

    /// `λ·P` for `λ >= 0`.
    pub fn scale(&self, lambda: &Rational) -> Result<Self> {
        if lambda.is_negative() {
            return Err(Error::Domain("scaling factor must be non-negative".into()));
        }
        let pts = self.vertices.iter().map(|v| v.iter().map(|c| c * lambda).collect()).collect();
        Self::new(self.dim, pts)
    }

    pub fn translate(&self, t: &[Rational]) -> Result<Self> {
        if t.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: t.len() });
        }
        let pts = self.vertices.iter().map(|v| v.iter().zip(t).map(|(a, b)| a + b).collect()).collect();
        Self::new(self.dim, pts)
    }

    pub fn minkowski_sum(&self, other: &RationalPolytope) -> Result<Self> {
        minkowski_sum(self, other)
    }
}

pub fn volume(p: &RationalPolytope) -> Rational {
    p.volume.clone()
}

/// `P + Q`: the hull of all pairwise vertex sums.
pub fn minkowski_sum(p: &RationalPolytope, q: &RationalPolytope) -> Result<RationalPolytope> {
    if p.dim != q.dim {
        return Err(Error::DimensionMismatch { expected: p.dim, found: q.dim });
    }
    let mut pts = Vec::with_capacity(p.vertices.len() * q.vertices.len());
    for a in &p.vertices {
        for b in &q.vertices {
            pts.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
        }
    }
    RationalPolytope::new(p.dim, pts)
}

/// `Σ λ_i A_i` for `λ_i >= 0`; a zero coefficient drops the body.
pub fn weighted_sum(bodies: &[RationalPolytope], lambda: &[Rational]) -> Result<RationalPolytope> {
    let dim = bodies.first().ok_or_else(|| Error::Domain("no bodies".into()))?.dim;
    let mut acc = RationalPolytope::origin(dim)?;
    for (b, l) in bodies.iter().zip(lambda) {
        if l.is_zero() {
            continue;
        }
        acc = minkowski_sum(&acc, &b.scale(l)?)?;
    }
    Ok(acc)
}

#[derive(Serialize, Deserialize)]
struct PolytopeJson {
    dim: usize,
    vertices: Vec<Vec<String>>,
}

impl Serialize for RationalPolytope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolytopeJson {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v.iter().map(format_rational).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPolytope {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolytopeJson::deserialize(d)?;
        let pts = raw
            .vertices
            .iter()
            .map(|v| v.iter().map(|c| parse_rational(c)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        RationalPolytope::new(raw.dim, pts).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn cube(dim: usize) -> RationalPolytope {
        let pts: Vec<Vec<i64>> = (0..1 << dim).map(|m| (0..dim).map(|i| (m >> i & 1) as i64).collect()).collect();
        RationalPolytope::from_integers(dim, &pts).unwrap()
    }

    fn simplex(dim: usize, a: Rational) -> RationalPolytope {
        let mut pts = vec![vec![Rational::zero(); dim]];
        for i in 0..dim {
            let mut p = vec![Rational::zero(); dim];
            p[i] = a.clone();
            pts.push(p);
        }
        RationalPolytope::new(dim, pts).unwrap()
    }

    #[test]
    fn basic_volumes() {
        assert_eq!(*cube(3).volume(), int(1));
        assert_eq!(cube(3).vertices().len(), 8);
        let seg = RationalPolytope::from_integers(2, &[vec![0, 0], vec![1, 0]]).unwrap();
        assert!(seg.volume().is_zero());
        assert_eq!(seg.rank(), 1);
        // a^N / N!
        assert_eq!(*simplex(3, rat(3, 2)).volume(), rat(27, 8) / int(6));
        assert_eq!(*simplex(2, int(5)).volume(), rat(25, 2));
        assert_eq!(*simplex(1, rat(7, 3)).volume(), rat(7, 3));
    }

    #[test]
    fn sums_and_scaling() {
        let p = simplex(3, int(2));
        assert_eq!(minkowski_sum(&p, &RationalPolytope::origin(3).unwrap()).unwrap(), p);
        let e1 = RationalPolytope::from_integers(2, &[vec![0, 0], vec![1, 0]]).unwrap();
        let e2 = RationalPolytope::from_integers(2, &[vec![0, 0], vec![0, 1]]).unwrap();
        assert_eq!(minkowski_sum(&e1, &e2).unwrap(), cube(2));
        let pp = minkowski_sum(&p, &p).unwrap();
        assert_eq!(*pp.volume(), p.volume() * int(8));
        assert_eq!(pp, p.scale(&int(2)).unwrap());
        assert!(minkowski_sum(&e1, &p).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let p = simplex(2, rat(1, 3));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"dim":2,"vertices":[["0","0"],["0","1/3"],["1/3","0"]]}"#);
        let back: RationalPolytope = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<RationalPolytope>(r#"{"dim":4,"vertices":[["0","0","0","0"]]}"#).is_err());
    }
}

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::Rational;
use crate::error::{Error, Result};

use super::hull::{int_hull, IPoint};
use super::{check_dim, factorial_i};

/// `Γ+ = conv(G) + R^N_{>=0}` for a finite set `G` of non-negative integer
/// vectors, stored by the vertices of `Γ+`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NewtonPolyhedron {
    dim: usize,
    generators: Vec<Vec<i64>>,
}

/// Points `g ∨_S m` (coordinates in `S` raised to `m`) over all generators
/// and all axis subsets `S`.
fn box_corners(dim: usize, generators: &[Vec<i64>], m: i64) -> Vec<IPoint> {
    let mut out = Vec::with_capacity(generators.len() << dim);
    for g in generators {
        for mask in 0..1u32 << dim {
            out.push(
                (0..dim)
                    .map(|i| if mask >> i & 1 == 1 { m as i128 } else { g[i] as i128 })
                    .collect(),
            );
        }
    }
    out
}

impl NewtonPolyhedron {
    pub fn new(dim: usize, generators: Vec<Vec<i64>>) -> Result<Self> {
        check_dim(dim)?;
        if generators.is_empty() {
            return Err(Error::Domain("a Newton polyhedron needs at least one generator".into()));
        }
        if let Some(g) = generators.iter().find(|g| g.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: g.len() });
        }
        if generators.iter().flatten().any(|&c| c < 0) {
            return Err(Error::Domain("generators must be non-negative".into()));
        }
        let generators = Self::reduce(dim, generators)?;
        for axis in 0..dim {
            let on_axis = generators
                .iter()
                .any(|g| g[axis] > 0 && (0..dim).all(|j| j == axis || g[j] == 0));
            if !on_axis {
                return Err(Error::NotConvenient { axis });
            }
        }
        Ok(Self { dim, generators })
    }

    /// Keeps only the vertices of `Γ+`: with `m` above every coordinate, a
    /// generator is a vertex of `Γ+` exactly when it is a vertex of the
    /// box-clipped body.
    fn reduce(dim: usize, mut generators: Vec<Vec<i64>>) -> Result<Vec<Vec<i64>>> {
        generators.sort();
        generators.dedup();
        // Drop dominated generators first; they are never vertices.
        let snapshot = generators.clone();
        generators.retain(|g| !snapshot.iter().any(|h| h != g && h.iter().zip(g).all(|(a, b)| a <= b)));
        if generators.len() <= 1 {
            return Ok(generators);
        }
        let m = generators.iter().flatten().copied().max().unwrap_or(0) + 1;
        let hull = int_hull(dim, &box_corners(dim, &generators, m))?;
        let verts: std::collections::HashSet<Vec<i128>> = hull.vertices.into_iter().collect();
        generators.retain(|g| verts.contains(&g.iter().map(|&c| c as i128).collect::<Vec<_>>()));
        Ok(generators)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vertices of `Γ+`, sorted.
    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn max_coordinate(&self) -> i64 {
        self.generators.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Axis intercept `m_i` with `m_i·e_i` a vertex.
    pub fn intercept(&self, axis: usize) -> i64 {
        self.generators
            .iter()
            .filter(|g| (0..self.dim).all(|j| j == axis || g[j] == 0))
            .map(|g| g[axis])
            .min()
            .expect("convenient")
    }

    /// `Vol_N(R^N_{>=0} \ Γ+)` with the default bound `M = N·max coordinate`.
    pub fn covolume(&self) -> Result<Rational> {
        self.covolume_with_bound(self.dim as i64 * self.max_coordinate())
    }

    /// `M^N - Vol_N(Γ+ ∩ [0, M]^N)`, valid for any `M` at least the largest
    /// coordinate; the clipped body is the hull of the box corners
    /// `g ∨_S M`.
    pub fn covolume_with_bound(&self, m: i64) -> Result<Rational> {
        if m < self.max_coordinate() {
            return Err(Error::Domain(format!("bound {m} below the largest coordinate {}", self.max_coordinate())));
        }
        let hull = int_hull(self.dim, &box_corners(self.dim, &self.generators, m))?;
        let fact = factorial_i(self.dim);
        let box_scaled = fact * (m as i128).pow(self.dim as u32);
        Ok(Rational::new(BigInt::from(box_scaled - hull.scaled_volume), BigInt::from(fact)))
    }

    /// `d·Γ+` for a positive integer `d`.
    pub fn scale(&self, d: i64) -> Result<Self> {
        if d <= 0 {
            return Err(Error::Domain("Newton polyhedra scale by positive integers".into()));
        }
        let gens = self.generators.iter().map(|g| g.iter().map(|c| c * d).collect()).collect();
        Ok(Self { dim: self.dim, generators: gens })
    }

    /// `Γ+_1 + Γ+_2`, generated by pairwise sums.
    pub fn sum(&self, other: &NewtonPolyhedron) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut gens = Vec::with_capacity(self.generators.len() * other.generators.len());
        for a in &self.generators {
            for b in &other.generators {
                gens.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
            }
        }
        Self::new(self.dim, gens)
    }

    /// Whether `Γ+` contains the integer point `x`, i.e. `x` dominates some
    /// point of `conv(G)`; decided as `x` lying in the clipped body.
    pub fn contains_point(&self, x: &[i64]) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        let m = self.max_coordinate().max(x.iter().copied().max().unwrap_or(0)) + 1;
        let corners = box_corners(self.dim, &self.generators, m);
        let base = int_hull(self.dim, &corners)?;
        let mut with = corners;
        with.push(x.iter().map(|&c| c as i128).collect());
        let ext = int_hull(self.dim, &with)?;
        Ok(x.iter().all(|&c| c >= 0) && ext.scaled_volume == base.scaled_volume)
    }

    /// `Γ+ ⊆ other`: every vertex of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &NewtonPolyhedron) -> Result<bool> {
        for g in &self.generators {
            if !other.contains_point(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `Σ λ_i Γ+_i` for non-negative integers `λ_i`, not all zero.
pub fn weighted_newton_sum(polys: &[NewtonPolyhedron], lambda: &[i64]) -> Result<NewtonPolyhedron> {
    let mut acc: Option<NewtonPolyhedron> = None;
    for (p, &l) in polys.iter().zip(lambda) {
        if l == 0 {
            continue;
        }
        let scaled = p.scale(l)?;
        acc = Some(match acc {
            None => scaled,
            Some(a) => a.sum(&scaled)?,
        });
    }
    acc.ok_or_else(|| Error::Domain("all scaling coefficients are zero".into()))
}

#[derive(Serialize, Deserialize)]
struct NewtonJson {
    dim: usize,
    generators: Vec<Vec<i64>>,
}

impl Serialize for NewtonPolyhedron {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        NewtonJson { dim: self.dim, generators: self.generators.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NewtonPolyhedron {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = NewtonJson::deserialize(d)?;
        NewtonPolyhedron::new(raw.dim, raw.generators).map_err(serde::de::Error::custom)
    }
}

//! Exact convex hulls of integer point sets in dimension 1 to 3.
//!
//! Coordinates are bounded by `2^36` so every orientation determinant fits
//! in `i128`; larger inputs are rejected with [`Error::Overflow`].

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_integer::Integer;

use crate::error::{Error, Result};

const COORD_BOUND: i128 = 1 << 36;

pub(crate) type IPoint = Vec<i128>;

/// Hull-reduced vertices, affine rank, and `N!·Vol_N` of the hull.
#[derive(Clone, Debug)]
pub(crate) struct IntHull {
    pub vertices: Vec<IPoint>,
    pub rank: usize,
    pub scaled_volume: i128,
}

pub(crate) fn check_bounds(points: &[IPoint]) -> Result<()> {
    if points.iter().flatten().any(|c| c.abs() >= COORD_BOUND) {
        return Err(Error::Overflow);
    }
    Ok(())
}

fn sub(a: &[i128], b: &[i128]) -> IPoint {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn cross(u: &[i128], v: &[i128]) -> [i128; 3] {
    [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
}

fn dot3(u: &[i128; 3], v: &[i128]) -> i128 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

/// `det(b - a, c - a, p - a)`; positive when `p` lies on the side the
/// right-handed normal of `(a, b, c)` points to.
fn orient3(a: &[i128], b: &[i128], c: &[i128], p: &[i128]) -> i128 {
    dot3(&cross(&sub(b, a), &sub(c, a)), &sub(p, a))
}

fn cross2(o: &[i128], a: &[i128], b: &[i128]) -> i128 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Strict monotone-chain hull of planar points: indices of the extreme
/// points in counter-clockwise order (collinear boundary points dropped).
fn hull2_indices(points: &[[i128; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| points[a].cmp(&points[b]));
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() <= 2 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && cross2(&points[lower[lower.len() - 2]], &points[lower[lower.len() - 1]], &points[i]) <= 0
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && cross2(&points[upper[upper.len() - 2]], &points[upper[upper.len() - 1]], &points[i]) <= 0
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn shoelace2(points: &[[i128; 2]], ring: &[usize]) -> i128 {
    let mut s = 0;
    for w in 0..ring.len() {
        let a = points[ring[w]];
        let b = points[ring[(w + 1) % ring.len()]];
        s += a[0] * b[1] - a[1] * b[0];
    }
    s
}

fn lex_extremes(points: &[IPoint]) -> Vec<IPoint> {
    let lo = points.iter().min().expect("non-empty").clone();
    let hi = points.iter().max().expect("non-empty").clone();
    if lo == hi {
        vec![lo]
    } else {
        vec![lo, hi]
    }
}

/// Drops the coordinate along which the plane normal is largest, giving an
/// injective projection of the plane to 2D.
fn project_plane(normal: &[i128; 3], points: &[IPoint]) -> Vec<[i128; 2]> {
    let axis = (0..3).max_by_key(|&i| normal[i].abs()).expect("three axes");
    let keep: Vec<usize> = (0..3).filter(|&i| i != axis).collect();
    points.iter().map(|p| [p[keep[0]], p[keep[1]]]).collect()
}

pub(crate) fn int_hull(dim: usize, points: &[IPoint]) -> Result<IntHull> {
    if points.is_empty() {
        return Err(Error::Domain("empty point set".into()));
    }
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
    }
    check_bounds(points)?;
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    match dim {
        1 => {
            let ext = lex_extremes(&pts);
            let vol = ext.last().unwrap()[0] - ext[0][0];
            Ok(IntHull { rank: ext.len() - 1, vertices: ext, scaled_volume: vol })
        }
        2 => Ok(hull2(&pts)),
        3 => hull3(&pts),
        _ => Err(Error::Domain(format!("dimension {dim} outside 1..=3"))),
    }
}

fn hull2(pts: &[IPoint]) -> IntHull {
    let p0 = &pts[0];
    let p1 = pts.iter().find(|p| *p != p0);
    let Some(p1) = p1 else {
        return IntHull { vertices: vec![p0.clone()], rank: 0, scaled_volume: 0 };
    };
    if pts.iter().all(|p| cross2(p0, p1, p) == 0) {
        return IntHull { vertices: lex_extremes(pts), rank: 1, scaled_volume: 0 };
    }
    let planar: Vec<[i128; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
    let ring = hull2_indices(&planar);
    let area2 = shoelace2(&planar, &ring);
    IntHull { vertices: ring.iter().map(|&i| pts[i].clone()).collect(), rank: 2, scaled_volume: area2 }
}

fn hull3(pts: &[IPoint]) -> Result<IntHull> {
    let p0 = &pts[0];
    let Some(i1) = pts.iter().position(|p| p != p0) else {
        return Ok(IntHull { vertices: vec![p0.clone()], rank: 0, scaled_volume: 0 });
    };
    let d1 = sub(&pts[i1], p0);
    let Some(i2) = pts.iter().position(|p| cross(&d1, &sub(p, p0)) != [0, 0, 0]) else {
        return Ok(IntHull { vertices: lex_extremes(pts), rank: 1, scaled_volume: 0 });
    };
    let normal = cross(&d1, &sub(&pts[i2], p0));
    let Some(i3) = pts.iter().position(|p| dot3(&normal, &sub(p, p0)) != 0) else {
        let planar = project_plane(&normal, pts);
        let ring = hull2_indices(&planar);
        return Ok(IntHull { vertices: ring.iter().map(|&i| pts[i].clone()).collect(), rank: 2, scaled_volume: 0 });
    };

    // Incremental hull; faces are oriented with outward right-handed normals.
    let init = [0usize, i1, i2, i3];
    let mut faces: Vec<[usize; 3]> = Vec::new();
    for skip in 0..4 {
        let f: Vec<usize> = (0..4).filter(|&j| j != skip).map(|j| init[j]).collect();
        let opposite = &pts[init[skip]];
        if orient3(&pts[f[0]], &pts[f[1]], &pts[f[2]], opposite) > 0 {
            faces.push([f[0], f[2], f[1]]);
        } else {
            faces.push([f[0], f[1], f[2]]);
        }
    }
    for (p, point) in pts.iter().enumerate() {
        if init.contains(&p) {
            continue;
        }
        let (visible, kept): (Vec<[usize; 3]>, Vec<[usize; 3]>) = faces
            .iter()
            .partition(|f| orient3(&pts[f[0]], &pts[f[1]], &pts[f[2]], point) > 0);
        if visible.is_empty() {
            continue;
        }
        let edges: HashSet<(usize, usize)> =
            visible.iter().flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])]).collect();
        faces = kept;
        for &(a, b) in &edges {
            if !edges.contains(&(b, a)) {
                faces.push([a, b, p]);
            }
        }
    }

    let o = &pts[faces[0][0]];
    let mut volume: i128 = 0;
    for f in &faces {
        let d = orient3(o, &pts[f[0]], &pts[f[1]], &pts[f[2]]);
        volume = volume.checked_add(d).ok_or(Error::Overflow)?;
    }

    // Group faces by supporting plane; the vertices are the extreme points
    // of each planar facet.
    let mut planes: BTreeMap<([i128; 3], i128), BTreeSet<usize>> = BTreeMap::new();
    for f in &faces {
        let mut n = cross(&sub(&pts[f[1]], &pts[f[0]]), &sub(&pts[f[2]], &pts[f[0]]));
        let g = n.iter().fold(0i128, |acc, &x| acc.gcd(&x));
        for x in n.iter_mut() {
            *x /= g;
        }
        let off = dot3(&n, &pts[f[0]]);
        planes.entry((n, off)).or_default().extend(f.iter().copied());
    }
    let mut vertices: BTreeSet<IPoint> = BTreeSet::new();
    for ((n, _), members) in &planes {
        let members: Vec<IPoint> = members.iter().map(|&i| pts[i].clone()).collect();
        let planar = project_plane(n, &members);
        for i in hull2_indices(&planar) {
            vertices.insert(members[i].clone());
        }
    }
    Ok(IntHull { vertices: vertices.into_iter().collect(), rank: 3, scaled_volume: volume.abs() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i128]) -> IPoint {
        v.to_vec()
    }

    /// Brute-force `6·Vol` from supporting planes of point triples.
    fn brute_volume6(pts: &[IPoint]) -> i128 {
        let mut planes: BTreeMap<([i128; 3], i128), BTreeSet<usize>> = BTreeMap::new();
        let n = pts.len();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut nrm = cross(&sub(&pts[b], &pts[a]), &sub(&pts[c], &pts[a]));
                    if nrm == [0, 0, 0] {
                        continue;
                    }
                    let off = dot3(&nrm, &pts[a]);
                    if pts.iter().all(|q| dot3(&nrm, q) <= off) {
                        let g = nrm.iter().fold(0i128, |acc, &x| acc.gcd(&x));
                        for x in nrm.iter_mut() {
                            *x /= g;
                        }
                        let off = dot3(&nrm, &pts[a]);
                        let on: BTreeSet<usize> = (0..n).filter(|&i| dot3(&nrm, &pts[i]) == off).collect();
                        planes.insert((nrm, off), on);
                    }
                }
            }
        }
        // Volume = Σ over facets of (height from origin-shifted apex) via
        // fan triangulation of each facet polygon from a fixed apex.
        let apex = &pts[0];
        let mut vol = 0;
        for ((nrm, _), on) in planes {
            let members: Vec<IPoint> = on.iter().map(|&i| pts[i].clone()).collect();
            let planar = project_plane(&nrm, &members);
            let ring = hull2_indices(&planar);
            for w in 1..ring.len().saturating_sub(1) {
                let (a, b, c) = (&members[ring[0]], &members[ring[w]], &members[ring[w + 1]]);
                vol += orient3(apex, a, b, c).abs();
            }
        }
        vol
    }

    #[test]
    fn cube_with_extra_points() {
        let mut pts = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    pts.push(p(&[x, y, z]));
                }
            }
        }
        let h = int_hull(3, &pts).unwrap();
        assert_eq!(h.rank, 3);
        assert_eq!(h.scaled_volume, 6 * 8);
        assert_eq!(h.vertices.len(), 8);
    }

    #[test]
    fn lower_dimensional() {
        let seg = int_hull(3, &[p(&[0, 0, 0]), p(&[1, 1, 1]), p(&[2, 2, 2])]).unwrap();
        assert_eq!((seg.rank, seg.vertices.len(), seg.scaled_volume), (1, 2, 0));
        let sq = int_hull(3, &[p(&[0, 0, 1]), p(&[1, 0, 1]), p(&[0, 1, 1]), p(&[1, 1, 1]), p(&[0, 0, 1])]).unwrap();
        assert_eq!((sq.rank, sq.vertices.len()), (2, 4));
        let tri = int_hull(2, &[p(&[0, 0]), p(&[2, 0]), p(&[0, 2]), p(&[1, 0])]).unwrap();
        assert_eq!((tri.scaled_volume, tri.vertices.len()), (4, 3));
        let pt = int_hull(2, &[p(&[3, 3])]).unwrap();
        assert_eq!(pt.rank, 0);
        let line = int_hull(1, &[p(&[3]), p(&[-2]), p(&[1])]).unwrap();
        assert_eq!(line.scaled_volume, 5);
    }

    #[test]
    fn random_sets_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let k = rng.gen_range(4..14);
            let pts: Vec<IPoint> = (0..k).map(|_| (0..3).map(|_| rng.gen_range(0..4)).collect()).collect();
            let h = int_hull(3, &pts).unwrap();
            if h.rank < 3 {
                continue;
            }
            let mut dedup = pts.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(h.scaled_volume, brute_volume6(&dedup), "{pts:?}");
            // The reduced vertex set spans the same hull.
            let again = int_hull(3, &h.vertices).unwrap();
            assert_eq!(again.scaled_volume, h.scaled_volume);
            assert_eq!(again.vertices, h.vertices);
        }
    }

    #[test]
    fn rejects_huge_coordinates() {
        assert!(matches!(int_hull(1, &[p(&[1 << 40])]), Err(Error::Overflow)));
    }
}

//! The composition poset `K(n, r)`.
//!
//! Elements are the ordered compositions of `n` into `r` non-negative parts,
//! kept in lexicographically descending order. The dominance order is the
//! reflexive-transitive closure of the elementary moves
//! `k -> k - e_i + e_j` allowed whenever `k_i - 1 >= k_j + 1`; `a ⪯ b` means
//! `a` is reachable from `b`. The closure is built lazily on first use and is
//! immutable afterwards, so a lattice can be shared between threads.

mod export;
mod quotient;

pub use export::{LatticeJson, QuotientJson};
pub use quotient::{dominates, MeetJoin, NonDistributiveWitness, QuotientPoset};

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{binom, Rational};
use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// Default bound on `|K(n, r)|` accepted by [`CompositionLattice::new`].
pub const DEFAULT_ENUMERATION_CAP: usize = 200_000;

/// An ordered composition `(k_1, ..., k_r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Composition(Vec<u32>);

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Domain("a composition needs at least one part".into()));
        }
        Ok(Self(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn n(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn r(&self) -> usize {
        self.0.len()
    }

    pub fn zero_count(&self) -> usize {
        self.0.iter().filter(|&&p| p == 0).count()
    }

    /// The sorted-descending representative of the permutation orbit.
    pub fn sorted_desc(&self) -> Composition {
        let mut p = self.0.clone();
        p.sort_unstable_by(|a, b| b.cmp(a));
        Composition(p)
    }

    pub fn permuted(&self, perm: &[usize]) -> Composition {
        Composition(perm.iter().map(|&i| self.0[i]).collect())
    }

    pub fn sum_of_squares(&self) -> u64 {
        self.0.iter().map(|&p| p as u64 * p as u64).sum()
    }

    /// All results of one elementary move (a unit from a part to a part at
    /// least two smaller).
    pub fn elementary_moves(&self) -> Vec<Composition> {
        let mut out = Vec::new();
        for i in 0..self.0.len() {
            for j in 0..self.0.len() {
                if i != j && self.0[i] >= self.0[j] + 2 {
                    let mut p = self.0.clone();
                    p[i] -= 1;
                    p[j] += 1;
                    out.push(Composition(p));
                }
            }
        }
        out
    }
}

impl From<&[u32]> for Composition {
    fn from(p: &[u32]) -> Self {
        Composition(p.to_vec())
    }
}

impl<const N: usize> From<[u32; N]> for Composition {
    fn from(p: [u32; N]) -> Self {
        Composition(p.to_vec())
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All compositions of `n` into `r` parts in lexicographically descending order.
pub fn compositions(n: u32, r: usize) -> Vec<Composition> {
    fn rec(rem: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Composition>) {
        if slots == 1 {
            cur.push(rem);
            out.push(Composition(cur.clone()));
            cur.pop();
            return;
        }
        for first in (0..=rem).rev() {
            cur.push(first);
            rec(rem - first, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r > 0 {
        rec(n, r, &mut Vec::with_capacity(r), &mut out);
    }
    out
}

/// `|K(n, r)| = binom(n + r - 1, n)`.
pub fn lattice_size(n: u32, r: usize) -> BigInt {
    if r == 0 {
        return BigInt::zero();
    }
    binom(n as i64 + r as i64 - 1, n as i64)
}

/// `|K^s(n, r)| = binom(r, s) * binom(n - 1, r - s - 1)`; for `n = 0` the
/// only element sits in stratum `r`.
pub fn stratum_size(n: u32, r: usize, s: usize) -> BigInt {
    if n == 0 {
        return BigInt::from((r > 0 && s == r) as u8);
    }
    binom(r as i64, s as i64) * binom(n as i64 - 1, r as i64 - s as i64 - 1)
}

/// The fully enumerated poset `K(n, r)` with its permutation orbits and
/// zero-count strata.
#[derive(Debug)]
pub struct CompositionLattice {
    n: u32,
    r: usize,
    elements: Vec<Composition>,
    index: HashMap<Composition, usize>,
    moves: Vec<Vec<usize>>,
    orbits: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
    strata: Vec<Vec<usize>>,
    down: OnceLock<Vec<BitSet>>,
    covers: OnceLock<Vec<(usize, usize)>>,
}

impl CompositionLattice {
    pub fn new(n: u32, r: usize) -> Result<Self> {
        Self::with_cap(n, r, DEFAULT_ENUMERATION_CAP)
    }

    pub fn with_cap(n: u32, r: usize, cap: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::Domain("r must be at least 1".into()));
        }
        let size = lattice_size(n, r);
        if size.to_usize().is_none_or(|s| s > cap) {
            return Err(Error::EnumerationTooLarge { n, r, size: size.to_string(), cap });
        }
        let elements = compositions(n, r);
        let index: HashMap<_, _> =
            elements.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let moves = elements
            .iter()
            .map(|c| c.elementary_moves().iter().map(|m| index[m]).collect())
            .collect();

        let mut orbit_ids: HashMap<Composition, usize> = HashMap::new();
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        let mut orbit_of = Vec::with_capacity(elements.len());
        for (i, c) in elements.iter().enumerate() {
            let key = c.sorted_desc();
            let id = *orbit_ids.entry(key).or_insert_with(|| {
                orbits.push(Vec::new());
                orbits.len() - 1
            });
            orbits[id].push(i);
            orbit_of.push(id);
        }

        let mut strata = vec![Vec::new(); r + 1];
        for (i, c) in elements.iter().enumerate() {
            strata[c.zero_count()].push(i);
        }

        Ok(Self {
            n,
            r,
            elements,
            index,
            moves,
            orbits,
            orbit_of,
            strata,
            down: OnceLock::new(),
            covers: OnceLock::new(),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Composition] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Composition {
        &self.elements[i]
    }

    pub fn index_of(&self, c: &Composition) -> Result<usize> {
        self.index
            .get(c)
            .copied()
            .ok_or_else(|| Error::Domain(format!("{c} is not an element of K({},{})", self.n, self.r)))
    }

    /// Indices reachable by a single elementary move from `i`.
    pub fn moves_from(&self, i: usize) -> &[usize] {
        &self.moves[i]
    }

    /// Down-sets of the closure: `down(i)` holds every `j` with `j ⪯ i`.
    fn down_sets(&self) -> &[BitSet] {
        self.down.get_or_init(|| {
            // Moves strictly decrease the sum of squares, so processing in
            // increasing sum-of-squares order sees every target first.
            let mut order: Vec<usize> = (0..self.len()).collect();
            order.sort_by_key(|&i| self.elements[i].sum_of_squares());
            let mut down = vec![BitSet::new(self.len()); self.len()];
            for &i in &order {
                let mut row = BitSet::new(self.len());
                row.insert(i);
                for &t in &self.moves[i] {
                    row.union_with(&down[t]);
                }
                down[i] = row;
            }
            down
        })
    }

    pub fn down_set(&self, i: usize) -> &BitSet {
        &self.down_sets()[i]
    }

    /// `elements[i] ⪯ elements[j]`.
    pub fn leq_idx(&self, i: usize, j: usize) -> bool {
        self.down_sets()[j].contains(i)
    }

    /// `a ⪯ b`: `a` is reachable from `b` by elementary moves.
    pub fn leq(&self, a: &Composition, b: &Composition) -> Result<bool> {
        Ok(self.leq_idx(self.index_of(a)?, self.index_of(b)?))
    }

    /// `a ⪰ b`.
    pub fn geq(&self, a: &Composition, b: &Composition) -> Result<bool> {
        self.leq(b, a)
    }

    pub fn comparable(&self, a: &Composition, b: &Composition) -> Result<bool> {
        Ok(self.leq(a, b)? || self.leq(b, a)?)
    }

    /// Cover relations as `(upper, lower)` index pairs.
    pub fn covers(&self) -> &[(usize, usize)] {
        self.covers.get_or_init(|| {
            let down = self.down_sets();
            let mut out = Vec::new();
            for i in 0..self.len() {
                let targets = &self.moves[i];
                for &t in targets {
                    let via_other = targets.iter().any(|&u| u != t && down[u].contains(t));
                    if !via_other {
                        out.push((i, t));
                    }
                }
            }
            out.sort_unstable();
            out
        })
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn orbit_of(&self, i: usize) -> usize {
        self.orbit_of[i]
    }

    /// The orbit of `a` under coordinate permutations.
    pub fn orbit(&self, a: &Composition) -> Result<Vec<Composition>> {
        let i = self.index_of(a)?;
        Ok(self.orbits[self.orbit_of[i]]
            .iter()
            .map(|&j| self.elements[j].clone())
            .collect())
    }

    /// Element indices with exactly `s` zero parts. Valid for `s <= r - 1`,
    /// and additionally `s = r` when `n = 0` (the all-zero composition).
    pub fn stratum_indices(&self, s: usize) -> Result<&[usize]> {
        let allowed = s < self.r || (self.n == 0 && s == self.r);
        if !allowed {
            return Err(Error::Domain(format!(
                "stratum index {s} outside 0..={} for K({},{})",
                self.r - 1,
                self.n,
                self.r
            )));
        }
        Ok(&self.strata[s])
    }

    pub fn stratum(&self, s: usize) -> Result<Vec<Composition>> {
        Ok(self
            .stratum_indices(s)?
            .iter()
            .map(|&i| self.elements[i].clone())
            .collect())
    }

    /// The natural bijections between strata and smaller lattices.
    pub fn stratum_iso(&self) -> Result<StrataIsomorphism> {
        let (n, r) = (self.n, self.r);
        if (n as usize) < r {
            return Ok(StrataIsomorphism::default());
        }
        let shift: Vec<(Composition, Composition)> = self.strata[0]
            .iter()
            .map(|&i| {
                let c = &self.elements[i];
                (c.clone(), Composition(c.0.iter().map(|p| p - 1).collect()))
            })
            .collect();
        let target = compositions(n - r as u32, r);
        check_bijection(&shift, &target, "K^0 -> K(n-r,r)")?;

        let mut patterns = Vec::new();
        for s in 1..r {
            let target: Vec<Composition> =
                compositions(n, r - s).into_iter().filter(|c| c.zero_count() == 0).collect();
            for zeros in subsets(r, s) {
                let pairs: Vec<(Composition, Composition)> = self.strata[s]
                    .iter()
                    .map(|&i| &self.elements[i])
                    .filter(|c| zeros.iter().all(|&z| c.0[z] == 0))
                    .map(|c| {
                        let kept = c
                            .0
                            .iter()
                            .enumerate()
                            .filter(|(j, _)| !zeros.contains(j))
                            .map(|(_, &p)| p)
                            .collect();
                        (c.clone(), Composition(kept))
                    })
                    .collect();
                check_bijection(&pairs, &target, "K^s(zero pattern) -> K^0(n,r-s)")?;
                patterns.push(ZeroPatternMap { zeros, pairs });
            }
        }
        Ok(StrataIsomorphism { shift, patterns })
    }

    /// Checks the inclusion-exclusion identity for values indexed like
    /// `elements()`.
    pub fn inclusion_exclusion_check(&self, values: &[Rational]) -> Result<InclusionExclusion> {
        if values.len() != self.len() {
            return Err(Error::Domain(format!(
                "expected {} values, found {}",
                self.len(),
                values.len()
            )));
        }
        let mut alternating = Rational::zero();
        for size in 0..=self.r {
            for zeros in subsets(self.r, size) {
                let sum: Rational = self
                    .elements
                    .iter()
                    .zip(values)
                    .filter(|(c, _)| zeros.iter().all(|&z| c.0[z] == 0))
                    .map(|(_, v)| v.clone())
                    .sum();
                if size % 2 == 0 {
                    alternating += sum;
                } else {
                    alternating -= sum;
                }
            }
        }
        let positive: Rational = self
            .elements
            .iter()
            .zip(values)
            .filter(|(c, _)| c.zero_count() == 0)
            .map(|(_, v)| v.clone())
            .sum();
        Ok(InclusionExclusion { holds: alternating == positive, alternating, positive })
    }

    pub fn quotient(&self) -> QuotientPoset {
        QuotientPoset::from_lattice(self)
    }
}

/// Both sides of the inclusion-exclusion identity.
#[derive(Clone, Debug, PartialEq)]
pub struct InclusionExclusion {
    pub holds: bool,
    pub alternating: Rational,
    pub positive: Rational,
}

#[derive(Clone, Debug, Default)]
pub struct ZeroPatternMap {
    pub zeros: Vec<usize>,
    pub pairs: Vec<(Composition, Composition)>,
}

/// `K^0(n,r) -> K(n-r,r)` and, per zero pattern, `K^s(n,r)(pattern) -> K^0(n,r-s)`.
#[derive(Clone, Debug, Default)]
pub struct StrataIsomorphism {
    pub shift: Vec<(Composition, Composition)>,
    pub patterns: Vec<ZeroPatternMap>,
}

fn check_bijection(
    pairs: &[(Composition, Composition)],
    target: &[Composition],
    what: &str,
) -> Result<()> {
    let mut images: Vec<&Composition> = pairs.iter().map(|(_, b)| b).collect();
    images.sort();
    let mut expected: Vec<&Composition> = target.iter().collect();
    expected.sort();
    if images != expected {
        return Err(Error::Structural(format!("{what} is not a bijection")));
    }
    Ok(())
}

/// All `size`-element subsets of `0..r`, each sorted ascending.
pub fn subsets(r: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, r: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..r {
            if r - i < left {
                break;
            }
            cur.push(i);
            rec(i + 1, r, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, r, size, &mut Vec::new(), &mut out);
    out
}

/// All permutations of `0..r` in lexicographic order.
pub fn permutations(r: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; r], &mut out);
    out
}

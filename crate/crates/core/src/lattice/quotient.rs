use std::collections::HashMap;

use crate::bitset::BitSet;
use crate::error::{Error, Result};

use super::{Composition, CompositionLattice};

/// Partial-sum dominance of two partitions (sorted descending, padded with
/// zeros to a common length): `a` dominates `b`.
pub fn dominates(a: &[u32], b: &[u32]) -> bool {
    let len = a.len().max(b.len());
    let (mut sa, mut sb) = (0u64, 0u64);
    for i in 0..len {
        sa += *a.get(i).unwrap_or(&0) as u64;
        sb += *b.get(i).unwrap_or(&0) as u64;
        if sa < sb {
            return false;
        }
    }
    true
}

/// `K(n, r)` modulo coordinate permutations: partitions of `n` into at most
/// `r` parts, ordered by the relation induced from the lattice.
#[derive(Clone, Debug)]
pub struct QuotientPoset {
    n: u32,
    r: usize,
    classes: Vec<Composition>,
    orbit_size: Vec<u64>,
    /// `down[c]` holds every class `d` with `d ⪯ c`.
    down: Vec<BitSet>,
    index: HashMap<Composition, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeetJoin {
    pub meet: usize,
    pub join: usize,
}

/// Three classes violating `x ∧ (y ∨ z) = (x ∧ y) ∨ (x ∧ z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonDistributiveWitness {
    pub x: Composition,
    pub y: Composition,
    pub z: Composition,
    pub lhs: Composition,
    pub rhs: Composition,
}

impl QuotientPoset {
    pub(super) fn from_lattice(lat: &CompositionLattice) -> Self {
        let classes: Vec<Composition> = lat
            .orbits()
            .iter()
            .map(|orb| lat.element(orb[0]).sorted_desc())
            .collect();
        let orbit_size = lat.orbits().iter().map(|o| o.len() as u64).collect();
        let down = lat
            .orbits()
            .iter()
            .map(|orb| {
                let mut row = BitSet::new(classes.len());
                for j in lat.down_set(orb[0]).iter() {
                    row.insert(lat.orbit_of(j));
                }
                row
            })
            .collect();
        let index = classes.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        Self { n: lat.n(), r: lat.r(), classes, orbit_size, down, index }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[Composition] {
        &self.classes
    }

    pub fn class(&self, i: usize) -> &Composition {
        &self.classes[i]
    }

    pub fn orbit_sizes(&self) -> &[u64] {
        &self.orbit_size
    }

    pub fn orbit_size(&self, i: usize) -> u64 {
        self.orbit_size[i]
    }

    /// Class index of any composition of `n`, given with at most `r` parts;
    /// shorter tuples are padded with zeros.
    pub fn class_index(&self, parts: &[u32]) -> Result<usize> {
        if parts.len() > self.r {
            return Err(Error::Domain(format!("{parts:?} has more than {} parts", self.r)));
        }
        let mut p = parts.to_vec();
        p.resize(self.r, 0);
        let key = Composition(p).sorted_desc();
        self.index
            .get(&key)
            .copied()
            .ok_or_else(|| Error::Domain(format!("{key} is not a class of K({},{})", self.n, self.r)))
    }

    pub fn down_set(&self, c: usize) -> &BitSet {
        &self.down[c]
    }

    /// Classes `d` with `c ⪯ d`.
    pub fn up_set(&self, c: usize) -> BitSet {
        let mut up = BitSet::new(self.len());
        for d in 0..self.len() {
            if self.down[d].contains(c) {
                up.insert(d);
            }
        }
        up
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.down[b].contains(a)
    }

    /// Cover relations `(upper, lower)`.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            let mut strict = self.down[a].clone();
            strict.remove(a);
            for b in strict.iter() {
                let between = strict.iter().any(|c| c != b && self.down[c].contains(b));
                if !between {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn maximal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&a| (0..self.len()).all(|b| b == a || !self.leq(a, b)))
            .collect()
    }

    pub fn minimal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&a| (0..self.len()).all(|b| b == a || !self.leq(b, a)))
            .collect()
    }

    /// The unique maximal class; structural error if not unique.
    pub fn top(&self) -> Result<usize> {
        match self.maximal().as_slice() {
            [t] => Ok(*t),
            other => Err(Error::Structural(format!("{} maximal classes", other.len()))),
        }
    }

    pub fn bottom(&self) -> Result<usize> {
        match self.minimal().as_slice() {
            [b] => Ok(*b),
            other => Err(Error::Structural(format!("{} minimal classes", other.len()))),
        }
    }

    pub fn is_chain(&self) -> bool {
        (0..self.len()).all(|a| (0..self.len()).all(|b| self.leq(a, b) || self.leq(b, a)))
    }

    /// Greatest lower bound and least upper bound by brute force over the
    /// relation. Missing or non-unique bounds are reported, never guessed.
    pub fn meet_join(&self, a: usize, b: usize) -> Result<MeetJoin> {
        let mut lower = self.down[a].clone();
        lower.intersect_with(&self.down[b]);
        let meets: Vec<usize> = lower.iter().filter(|&m| lower.is_subset(&self.down[m])).collect();

        let mut upper = self.up_set(a);
        upper.intersect_with(&self.up_set(b));
        let joins: Vec<usize> = upper
            .iter()
            .filter(|&j| upper.iter().all(|u| self.leq(j, u)))
            .collect();

        match (meets.as_slice(), joins.as_slice()) {
            ([m], [j]) => Ok(MeetJoin { meet: *m, join: *j }),
            _ => Err(Error::Structural(format!(
                "{} and {} have {} greatest lower and {} least upper bounds",
                self.classes[a],
                self.classes[b],
                meets.len(),
                joins.len()
            ))),
        }
    }

    pub fn meet(&self, a: usize, b: usize) -> Result<usize> {
        Ok(self.meet_join(a, b)?.meet)
    }

    pub fn join(&self, a: usize, b: usize) -> Result<usize> {
        Ok(self.meet_join(a, b)?.join)
    }

    /// True iff the induced order agrees with partial-sum dominance on every
    /// pair of classes.
    pub fn matches_dominance(&self) -> bool {
        (0..self.len()).all(|a| {
            (0..self.len())
                .all(|b| self.leq(a, b) == dominates(self.classes[b].parts(), self.classes[a].parts()))
        })
    }

    /// Whether `members` is closed under the quotient's meet and join.
    pub fn is_sublattice(&self, members: &[usize]) -> Result<bool> {
        for &a in members {
            for &b in members {
                let mj = self.meet_join(a, b)?;
                if !members.contains(&mj.meet) || !members.contains(&mj.join) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Searches `members` for a triple violating distributivity.
    pub fn distributivity_witness(&self, members: &[usize]) -> Result<Option<NonDistributiveWitness>> {
        for &x in members {
            for &y in members {
                for &z in members {
                    let lhs = self.meet(x, self.join(y, z)?)?;
                    let rhs = self.join(self.meet(x, y)?, self.meet(x, z)?)?;
                    if lhs != rhs {
                        return Ok(Some(NonDistributiveWitness {
                            x: self.classes[x].clone(),
                            y: self.classes[y].clone(),
                            z: self.classes[z].clone(),
                            lhs: self.classes[lhs].clone(),
                            rhs: self.classes[rhs].clone(),
                        }));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn is_distributive(&self) -> Result<bool> {
        let all: Vec<usize> = (0..self.len()).collect();
        Ok(self.distributivity_witness(&all)?.is_none())
    }
}

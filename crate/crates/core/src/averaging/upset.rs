use std::sync::Arc;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::lattice::{CompositionLattice, QuotientPoset};

use super::LatticeFunction;

/// Default cap on the number of quotient filters enumerated.
pub const DEFAULT_FILTER_CAP: usize = 1_000_000;

/// An upward-closed, permutation-invariant subset of `K(n, r)`.
#[derive(Clone, Debug)]
pub struct UpSet {
    lattice: Arc<CompositionLattice>,
    members: BitSet,
}

impl UpSet {
    pub fn new(lattice: Arc<CompositionLattice>, members: BitSet) -> Result<Self> {
        if members.len() != lattice.len() {
            return Err(Error::Domain("member set does not match the lattice".into()));
        }
        for i in members.iter() {
            for &j in lattice.orbits()[lattice.orbit_of(i)].iter() {
                if !members.contains(j) {
                    return Err(Error::Precondition(format!(
                        "not invariant: contains {} but not {}",
                        lattice.element(i),
                        lattice.element(j)
                    )));
                }
            }
        }
        // Upward closure only needs checking along covers.
        for &(u, l) in lattice.covers() {
            if members.contains(l) && !members.contains(u) {
                return Err(Error::Precondition(format!(
                    "not upward closed: contains {} but not {}",
                    lattice.element(l),
                    lattice.element(u)
                )));
            }
        }
        Ok(Self { lattice, members })
    }

    pub fn from_predicate(lattice: Arc<CompositionLattice>, pred: impl Fn(usize) -> bool) -> Result<Self> {
        let mut members = BitSet::new(lattice.len());
        for i in 0..lattice.len() {
            if pred(i) {
                members.insert(i);
            }
        }
        Self::new(lattice, members)
    }

    /// Lifts a filter of the quotient (a set of class indices) to `K(n, r)`.
    pub fn from_filter(lattice: Arc<CompositionLattice>, classes: &BitSet) -> Result<Self> {
        let mut members = BitSet::new(lattice.len());
        for c in classes.iter() {
            for &i in &lattice.orbits()[c] {
                members.insert(i);
            }
        }
        Self::new(lattice, members)
    }

    pub fn empty(lattice: Arc<CompositionLattice>) -> Self {
        let members = BitSet::new(lattice.len());
        Self { lattice, members }
    }

    pub fn full(lattice: Arc<CompositionLattice>) -> Self {
        let members = BitSet::full(lattice.len());
        Self { lattice, members }
    }

    pub fn lattice(&self) -> &Arc<CompositionLattice> {
        &self.lattice
    }

    pub fn members(&self) -> &BitSet {
        &self.members
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(i)
    }

    pub fn len(&self) -> usize {
        self.members.count()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.is_empty() || self.len() == self.lattice.len()
    }

    pub fn intersection_len(&self, other: &UpSet) -> usize {
        let mut m = self.members.clone();
        m.intersect_with(&other.members);
        m.count()
    }

    pub fn indicator(&self) -> LatticeFunction {
        let members = self.members.clone();
        LatticeFunction::indicator(self.lattice.clone(), |c| {
            members.contains(self.lattice.index_of(c).expect("own element"))
        })
    }
}

/// Every filter (up-set) of the quotient poset, as sets of class indices,
/// each exactly once. Equivalent to enumerating the antichains of minimal
/// elements.
pub fn enumerate_filters(q: &QuotientPoset, cap: usize) -> Result<Vec<BitSet>> {
    let m = q.len();
    let ups: Vec<BitSet> = (0..m).map(|c| q.up_set(c)).collect();
    let downs: Vec<BitSet> = (0..m).map(|c| q.down_set(c).clone()).collect();
    let mut out = Vec::new();

    // Explicit stack of (included, undecided).
    let mut stack = vec![(BitSet::new(m), BitSet::full(m))];
    while let Some((included, undecided)) = stack.pop() {
        let Some(i) = undecided.iter().next() else {
            out.push(included);
            if out.len() > cap {
                return Err(Error::FilterCapExceeded { cap });
            }
            continue;
        };
        // Exclude i: everything below i leaves the filter.
        let mut und_ex = undecided.clone();
        und_ex.difference_with(&downs[i]);
        stack.push((included.clone(), und_ex));
        // Include i: everything above i joins the filter.
        let mut inc = included;
        inc.union_with(&ups[i]);
        let mut und_in = undecided;
        und_in.difference_with(&ups[i]);
        stack.push((inc, und_in));
    }
    Ok(out)
}

use std::collections::{BTreeSet, VecDeque};

use comp_fkg::lattice::{compositions, lattice_size, Composition};
use comp_fkg::CompositionLattice;
use num_bigint::BigInt;
use proptest::prelude::*;

/// Everything reachable from `b` by elementary moves, by breadth-first search.
fn reachable(b: &Composition) -> BTreeSet<Vec<u32>> {
    let mut seen = BTreeSet::from([b.parts().to_vec()]);
    let mut queue = VecDeque::from([b.parts().to_vec()]);
    while let Some(p) = queue.pop_front() {
        for i in 0..p.len() {
            for j in 0..p.len() {
                if p[i] >= p[j] + 2 {
                    let mut next = p.clone();
                    next[i] -= 1;
                    next[j] += 1;
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    seen
}

fn small() -> impl Strategy<Value = (u32, usize)> {
    (0u32..=7, 1usize..=4)
}

proptest! {
    #[test]
    fn order_is_reachability((n, r) in small()) {
        let lat = CompositionLattice::new(n, r).unwrap();
        for j in 0..lat.len() {
            let down = reachable(lat.element(j));
            for i in 0..lat.len() {
                prop_assert_eq!(lat.leq_idx(i, j), down.contains(lat.element(i).parts()));
            }
        }
    }

    #[test]
    fn order_is_partial_and_permutation_invariant((n, r) in small(), rot in 0usize..4) {
        let lat = CompositionLattice::new(n, r).unwrap();
        let perm: Vec<usize> = (0..r).map(|i| (i + rot) % r).collect();
        for i in 0..lat.len() {
            prop_assert!(lat.leq_idx(i, i));
            for j in 0..lat.len() {
                if i != j && lat.leq_idx(i, j) {
                    prop_assert!(!lat.leq_idx(j, i));
                    prop_assert!(lat.element(i).sum_of_squares() < lat.element(j).sum_of_squares());
                }
                let pi = lat.index_of(&lat.element(i).permuted(&perm)).unwrap();
                let pj = lat.index_of(&lat.element(j).permuted(&perm)).unwrap();
                prop_assert_eq!(lat.leq_idx(i, j), lat.leq_idx(pi, pj));
            }
        }
    }

    #[test]
    fn orbits_partition_the_lattice((n, r) in small()) {
        let lat = CompositionLattice::new(n, r).unwrap();
        let mut seen = vec![false; lat.len()];
        for (o, orbit) in lat.orbits().iter().enumerate() {
            let key = lat.element(orbit[0]).sorted_desc();
            for &i in orbit {
                prop_assert!(!seen[i]);
                seen[i] = true;
                prop_assert_eq!(lat.orbit_of(i), o);
                prop_assert_eq!(lat.element(i).sorted_desc(), key.clone());
            }
        }
        prop_assert!(seen.into_iter().all(|x| x));
        prop_assert_eq!(lat.quotient().len(), lat.orbits().len());
    }

    #[test]
    fn covers_generate_the_order((n, r) in small()) {
        let lat = CompositionLattice::new(n, r).unwrap();
        let covers: BTreeSet<(usize, usize)> = lat.covers().iter().copied().collect();
        for &(hi, lo) in &covers {
            prop_assert!(lat.leq_idx(lo, hi) && lo != hi);
            let between = (0..lat.len()).any(|k| k != lo && k != hi && lat.leq_idx(lo, k) && lat.leq_idx(k, hi));
            prop_assert!(!between);
        }
    }
}

#[test]
fn enumeration_matches_size_and_order() {
    for r in 1..=5 {
        for n in 0..=9 {
            let comps = compositions(n, r);
            assert_eq!(BigInt::from(comps.len()), lattice_size(n, r));
            assert!(comps.windows(2).all(|w| w[0].parts() > w[1].parts()));
            assert!(comps.iter().all(|c| c.n() == n && c.r() == r));
        }
    }
}

#[test]
fn cap_is_enforced() {
    assert!(CompositionLattice::with_cap(10, 5, 100).is_err());
    assert!(CompositionLattice::with_cap(10, 5, 1001).is_ok());
}

#[test]
fn exports_are_consistent() {
    let lat = CompositionLattice::new(3, 3).unwrap();
    let dot = lat.to_dot();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), lat.covers().len());
    let json = serde_json::to_value(lat.to_json()).unwrap();
    assert!(json.is_object());
}

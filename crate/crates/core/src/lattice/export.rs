//! Hasse-diagram export: DOT text and the lattice JSON document
//! `{"n":…, "r":…, "elements":[[k1,…,kr],…], "covers":[[i,j],…]}`.
//! A cover `[i, j]` means `elements[i]` covers `elements[j]`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Composition, CompositionLattice, QuotientPoset};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub n: u32,
    pub r: usize,
    pub elements: Vec<Composition>,
    pub covers: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientJson {
    pub n: u32,
    pub r: usize,
    pub elements: Vec<Composition>,
    pub covers: Vec<[usize; 2]>,
    pub orbit_sizes: Vec<u64>,
}

fn dot(name: &str, labels: &[Composition], covers: &[(usize, usize)]) -> String {
    let mut s = String::new();
    writeln!(s, "digraph {name} {{").unwrap();
    writeln!(s, "  rankdir=TB;").unwrap();
    for (i, c) in labels.iter().enumerate() {
        writeln!(s, "  n{i} [label=\"{c}\"];").unwrap();
    }
    for (a, b) in covers {
        writeln!(s, "  n{a} -> n{b};").unwrap();
    }
    s.push_str("}\n");
    s
}

impl CompositionLattice {
    pub fn to_dot(&self) -> String {
        dot(&format!("K_{}_{}", self.n(), self.r()), self.elements(), self.covers())
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson {
            n: self.n(),
            r: self.r(),
            elements: self.elements().to_vec(),
            covers: self.covers().iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

impl QuotientPoset {
    pub fn to_dot(&self) -> String {
        dot(&format!("Q_{}_{}", self.n(), self.r()), self.classes(), &self.covers())
    }

    pub fn to_json(&self) -> QuotientJson {
        QuotientJson {
            n: self.n(),
            r: self.r(),
            elements: self.classes().to_vec(),
            covers: self.covers().iter().map(|&(a, b)| [a, b]).collect(),
            orbit_sizes: self.orbit_sizes().to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k22_dot_and_json() {
        let lat = CompositionLattice::new(2, 2).unwrap();
        let dot = lat.to_dot();
        assert_eq!(dot.matches("[label=").count(), 3);
        assert_eq!(dot.matches("->").count(), 2);
        assert!(dot.contains("label=\"(1,1)\""));
        let json = serde_json::to_string(&lat.to_json()).unwrap();
        assert_eq!(
            json,
            r#"{"n":2,"r":2,"elements":[[2,0],[1,1],[0,2]],"covers":[[0,1],[2,1]]}"#
        );
    }

    #[test]
    fn quotient_json_roundtrip() {
        let q = CompositionLattice::new(6, 3).unwrap().quotient();
        let j = q.to_json();
        let back: QuotientJson = serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
        assert_eq!(back, j);
        assert_eq!(j.orbit_sizes.iter().sum::<u64>(), 28);
    }
}

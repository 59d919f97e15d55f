//! Composition lattices `K(n, r)` under the dominance order, exact averaging
//! inequalities over them, and exact mixed volumes and covolumes in
//! dimension at most three.

pub mod arith;
pub mod averaging;
pub mod bitset;
pub mod error;
pub mod geometry;
pub mod interval;
pub mod lattice;
pub mod report;
pub mod suite;

pub use arith::Rational;
pub use error::{Error, Result};
pub use lattice::{Composition, CompositionLattice, QuotientPoset};

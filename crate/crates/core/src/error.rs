use thiserror::Error;

/// Errors raised by the lattice, averaging, geometry and inequality layers.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The requested lattice has more elements than the configured cap.
    #[error("K({n},{r}) has {size} elements, above the enumeration cap {cap}")]
    EnumerationTooLarge { n: u32, r: usize, size: String, cap: usize },

    /// The number of filters of a quotient poset exceeded the cap.
    #[error("filter enumeration exceeded the cap of {cap} filters")]
    FilterCapExceeded { cap: usize },

    /// An argument is outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A hypothesis of a verifier was not met; carries a witness.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A structural claim about the poset failed (missing or non-unique bound).
    #[error("structural assertion failed: {0}")]
    Structural(String),

    /// Dimension mismatch between geometric inputs.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A Newton polyhedron does not meet some coordinate axis.
    #[error("Newton polyhedron is not convenient: no generator on axis {axis}")]
    NotConvenient { axis: usize },

    /// Integer coordinates grew past the exact kernel's range.
    #[error("coordinate magnitude too large for the exact kernel")]
    Overflow,

    /// A singular linear system where a unisolvent one was expected.
    #[error("singular interpolation system")]
    SingularSystem,

    /// Malformed external input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

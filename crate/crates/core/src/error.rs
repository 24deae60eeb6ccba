use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid or inconsistent configuration (rates, cutoffs, grids, memory limits).
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two objects defined on different truncated spaces were combined.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A matrix failed the density-matrix invariants at construction.
    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    /// The diagonalized path was requested at (or too close to) the exceptional point.
    #[error("exceptional point: {0}; use the direct propagator path")]
    ExceptionalPoint(String),

    /// The truncated Fock space is too small for the requested accuracy.
    #[error("truncation error: {0}; increase the cutoff")]
    Truncation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

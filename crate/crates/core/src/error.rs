//! Error type shared across the crate.

/// Errors produced by model construction, solvers and the quantum pipelines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A constructor or operation was handed parameters outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An index or truncation depth fell outside the valid range.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// Operand shapes or qubit counts do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A numerical solver failed to produce a usable result.
    #[error("solver failure: {0}")]
    Solver(String),

    /// The zero eigenspace has multiplicity above one, so the steady state
    /// is not unique.
    #[error("degenerate zero eigenspace: {0}")]
    DegenerateZeromode(String),

    /// Phase estimation found no measurement outcome above the noise floor.
    /// The full histogram of `(bin, counts)` pairs is attached.
    #[error("phase estimation failed: no outcome above the noise floor ({} bins recorded)", histogram.len())]
    PhaseEstimation { histogram: Vec<(u64, u64)> },

    /// The variational SVD did not expose a (near-)null singular direction.
    #[error("null space not found: smallest estimated singular value {0:.6} exceeds 0.1")]
    NullSpaceNotFound(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn solver(err: impl std::fmt::Display) -> Self {
        Error::Solver(err.to_string())
    }
}

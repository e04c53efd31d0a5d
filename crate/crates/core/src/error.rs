//! Error type shared by every module.

use alloc::string::String;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Vector arguments disagree with the field dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch {
        /// Expected length.
        expected: usize,
        /// Supplied length.
        got: usize,
    },
    /// A dyadic prefactor `2^(Σj/α)` would leave the finite f64 range.
    #[error("prefactor overflow: 2^{exponent} is not representable")]
    Overflow {
        /// The offending base-2 exponent.
        exponent: f64,
    },
    /// Adaptive quadrature failed to reach its tolerance.
    #[error("quadrature did not converge: {0}")]
    NoConvergence(String),
    /// A kernel table does not cover the requested arguments.
    #[error("kernel table coverage insufficient: {0}")]
    Coverage(String),
    /// A documented precondition (e.g. a differentiability condition) fails.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A scan was configured inconsistently with its lattice.
    #[error("lattice mismatch: {0}")]
    Lattice(String),
}

/// Result alias.
pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

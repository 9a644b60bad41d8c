//! Crate-wide error type.
//!
//! ## Purpose
//! One enum covers every failure mode the library can produce so callers
//! (including the CLI) can map errors onto a small set of exit codes:
//! invalid inputs/parameters vs. numerical non-convergence.
//!
//! ## Conventions
//! - `InvalidParameter` and `InvalidInput` are caller errors (CLI exit code 2).
//! - `NonConvergence` means a numerical routine exhausted its budget
//!   (CLI exit code 3); the message carries the bracket/iteration state so
//!   failures are diagnosable.

use thiserror::Error;

/// Errors produced by statistics, samplers, fitters and condition checkers.
#[derive(Debug, Error)]
pub enum Error {
    /// A distribution/test parameter violates its documented constraint.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input data violates a precondition (size, ordering, support, ties).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An iterative numerical routine failed to converge.
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Build an `InvalidParameter` from anything displayable.
    pub fn param(msg: impl std::fmt::Display) -> Self {
        Error::InvalidParameter(msg.to_string())
    }

    /// Build an `InvalidInput` from anything displayable.
    pub fn input(msg: impl std::fmt::Display) -> Self {
        Error::InvalidInput(msg.to_string())
    }

    /// Build a `NonConvergence` from anything displayable.
    pub fn no_conv(msg: impl std::fmt::Display) -> Self {
        Error::NonConvergence(msg.to_string())
    }
}

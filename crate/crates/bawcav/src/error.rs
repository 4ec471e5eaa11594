//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Config or CSV text that does not match the grammar.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Unknown unit suffix, or a suffix of the wrong dimension for its key.
    #[error("unit error at line {line}: {msg}")]
    Unit { line: usize, msg: String },

    /// One or more violated invariants.
    #[error("validation error: {0}")]
    Validation(String),

    /// Input outside the supported domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative computation did not settle within its tolerance.
    #[error("non-convergence: {0}")]
    NonConvergence(String),

    /// Too few or degenerate data points.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Normal equations of a fit step are degenerate.
    #[error("singular step: {0}")]
    SingularStep(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 for anything the user can fix in
    /// their inputs, 2 for I/O failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io(_) => 2,
            _ => 1,
        }
    }
}

//! Error type shared by every module, with the CLI exit-code mapping.

use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    /// An argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value or family identifier is invalid.
    #[error("configuration error: {0}")]
    Config(String),

    /// The orbit of the critical point hit an integer exactly.
    #[error("periodic orbit: level {level}, period {period}")]
    PeriodicOrbit {
        /// Continued-fraction level at which the hit occurred.
        level: usize,
        /// Iterate index of the exact return.
        period: u64,
    },

    /// A bracketing search was started outside its valid range.
    #[error("range error: {0}")]
    Range(String),

    /// A solver did not reach the requested depth.
    #[error("solver depth error: {0}")]
    SolverDepth(String),

    /// An iteration or precision budget was exhausted.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// A pair has infinite period and cannot be renormalized.
    #[error("pair is not renormalizable")]
    NotRenormalizable,

    /// A structural invariant (pair validation, labels, recomposition) failed.
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// Reading or writing a report failed.
    #[error("i/o error: {0}")]
    Io(String),
}

impl LabError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::Domain(_) | LabError::Io(_) => 2,
            LabError::PeriodicOrbit { .. }
            | LabError::Range(_)
            | LabError::SolverDepth(_)
            | LabError::PrecisionExhausted(_)
            | LabError::NotRenormalizable => 3,
            LabError::Invariant(_) => 4,
        }
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, LabError>;

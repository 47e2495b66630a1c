//! Error type shared across the crate.
//!
//! Variants split into two broad families: problems with the caller's input
//! (malformed CSV, schema violations, bad specifications) and problems
//! discovered during numerical work (degenerate statistics, separation,
//! non-convergence). [`Error::is_numerical`] distinguishes the two so the
//! command-line tool can map them to different exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("csv parse error at row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error("schema error: {message}")]
    Schema { message: String },

    #[error("duplicate column {name:?} in header")]
    DuplicateHeader { name: String },

    #[error("header does not match schema: missing {missing:?}, unexpected {unexpected:?}")]
    HeaderMismatch {
        missing: Vec<String>,
        unexpected: Vec<String>,
    },

    #[error("data row {row}, column {column:?}: empty cell")]
    MissingCell { row: usize, column: String },

    #[error("data row {row}, column {column:?}: expected a number, got {value:?}")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("data row {row}, column {column:?}: value must be finite")]
    NonFinite { row: usize, column: String },

    #[error("data row {row}, column {column:?}: expected 0 or 1, got {value:?}")]
    NotBinary {
        row: usize,
        column: String,
        value: String,
    },

    #[error("data row {row}, column {column:?}: unknown category {value:?}")]
    UnknownCategory {
        row: usize,
        column: String,
        value: String,
    },

    #[error("unknown column {name:?}")]
    UnknownColumn { name: String },

    #[error("column {column:?} has role {actual}, expected {expected}")]
    RoleMismatch {
        column: String,
        actual: String,
        expected: String,
    },

    #[error("column {column:?}: {message}")]
    KindMismatch { column: String, message: String },

    #[error("not enough rows: need at least {needed}, got {got}")]
    TooFewRows { needed: usize, got: usize },

    #[error("invalid fraction {value}: must be strictly between 0 and 1")]
    InvalidFraction { value: f64 },

    #[error("invalid specification: {message}")]
    InvalidSpec { message: String },

    #[error("failed to parse {what}: {message}")]
    Parse { what: String, message: String },

    #[error("outcome column {column:?} has only one observed class")]
    OneClassOutcome { column: String },

    #[error("degenerate input: {message}")]
    Degenerate { message: String },

    #[error("logistic fit did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error(
        "quasi-complete separation detected on {column:?} \
         (standardized coefficient magnitude {coefficient:.3})"
    )]
    Separation { column: String, coefficient: f64 },

    #[error("numerical failure: {message}")]
    NumericFailure { message: String },

    #[error("accuracy orientations differ; models are not comparable")]
    MixedOrientation,

    #[error("lock-box digest mismatch: expected {expected}, got {actual}")]
    DigestMismatch { expected: String, actual: String },
}

impl Error {
    /// True when the error arose from numerical work on well-formed input
    /// (degenerate statistics, separation, non-convergence) rather than from
    /// the input itself.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Degenerate { .. }
                | Error::NonConvergence { .. }
                | Error::Separation { .. }
                | Error::NumericFailure { .. }
        )
    }
}

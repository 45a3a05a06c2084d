//! Command-line wiring for the `pbnq` binary: argument parsing, file
//! schemas, DOT export and bundled fixtures. All numerics live in `pbnq`.

pub mod commands;
pub mod dot;
pub mod fixtures;
pub mod schema;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] pbnq::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

/// What a command produced: an optional document for `--out` (or stdout), a
/// human-readable summary, and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub document: Option<String>,
    pub summary: String,
    pub code: i32,
}

impl Outcome {
    fn ok(document: String, summary: String) -> Self {
        Self {
            document: Some(document),
            summary,
            code: EXIT_OK,
        }
    }
}

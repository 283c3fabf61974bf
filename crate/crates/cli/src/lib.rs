//! Experiment runner behind the `flaglab` binary.

pub mod config;
pub mod experiments;
pub mod report;

use std::fmt;

pub use config::{ExperimentConfig, Loaded, Overrides};
pub use experiments::{run, Subcommand};
pub use report::RunReport;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration, with a `path:line:` prefix.
    Config(String),
    /// A numerical operation failed.
    Numerical { op: &'static str, source: flaglab::Error },
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Numerical { op, source } => write!(f, "{op}: {source}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Tags a library error with the operation that produced it.
pub(crate) trait Op<T> {
    fn op(self, op: &'static str) -> Result<T, CliError>;
}

impl<T> Op<T> for flaglab::Result<T> {
    fn op(self, op: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Numerical { op, source })
    }
}

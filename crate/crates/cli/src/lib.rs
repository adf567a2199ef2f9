//! File formats and command implementations behind the `afem` binary.

pub mod commands;
pub mod config;
pub mod history;
pub mod mesh_io;
pub mod plot;

use afem_core::Error as CoreError;

/// Failure of a command, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config or input files (exit code 2).
    #[error("usage: {0}")]
    Usage(String),
    /// The computation itself failed (exit code 1).
    #[error("numerical failure: {0}")]
    Numerical(#[from] CoreError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(CoreError::InvalidParameter(_)) => 2,
            CliError::Numerical(_) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

//! Command implementations and I/O for the `srs` binary.
//!
//! Everything the binary does is exposed as a library function returning a
//! [`table::ScanTable`] or [`table::Report`], so the command pipelines are
//! testable without spawning processes.

pub mod commands;
pub mod config;
pub mod table;

use thiserror::Error;

/// Top-level failure classes, mapped to process exit codes: configuration
/// problems exit 2, numerical non-convergence exits 3, I/O exits 1.
#[derive(Debug, Error)]
pub enum AppError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerics(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl AppError {
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Io(_) => 1,
            AppError::Config(_) => 2,
            AppError::Numerics(_) => 3,
        }
    }
}

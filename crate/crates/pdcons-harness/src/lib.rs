//! Experiment harness for the consensus primal-dual solvers: JSON-configured
//! experiments, internally computed reference solutions, multi-seed sweeps
//! with CSV output, baseline comparisons, and certificate verification runs.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod records;
pub mod reference;
pub mod synth;

use thiserror::Error;

/// Harness-level error: configuration problems are distinguished from
/// runtime failures so the CLI can map them to different exit codes.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] pdcons::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

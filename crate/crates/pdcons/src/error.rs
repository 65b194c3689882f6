use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Graph construction or validation failed (disconnected, too small, ...).
    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    /// Randomized graph construction exhausted its retry budget.
    #[error("graph construction failed: {0}")]
    ConstructionFailure(String),

    /// A candidate augmentation matrix violates the structural assumptions.
    #[error("augmentation assumption violated ({check}): {detail}")]
    AssumptionViolation { check: &'static str, detail: String },

    /// Objective parameters are out of their admissible domain.
    #[error("invalid objective: {0}")]
    InvalidObjective(String),

    /// Dataset cannot be split across the requested number of agents.
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    /// Malformed dataset file.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Dataset is structurally unsupported (e.g. more than two label classes).
    #[error("unsupported dataset: {0}")]
    UnsupportedDataset(String),

    /// Primal stepsize fails the spectral precondition.
    #[error("stepsize violation: {0}")]
    StepsizeViolation(String),

    /// Dimension or argument mismatch.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The freshness parameter is outside its admissible interval.
    #[error("invalid eta: {0}")]
    InvalidEta(String),

    /// A matrix required by the analysis is numerically singular.
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    /// Iterates blew past the divergence guard.
    #[error("divergence detected: {0}")]
    Divergence(String),

    /// No positive rate constant could be certified for in-bounds stepsizes.
    #[error("certification failure: {0}")]
    CertificationFailure(String),

    /// An inner minimization did not reach its tolerance.
    #[error("inner solve failure: {0}")]
    InnerSolveFailure(String),

    /// The reference solution could not be computed.
    #[error("reference failure: {0}")]
    ReferenceFailure(String),

    /// I/O error while reading a dataset or writing an export.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced by the beam model, its discretization and the run driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("classification error: K = {k} is outside (0, 2)")]
    Classification { k: f64 },

    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("no admissible delta: {0}")]
    InfeasibleDelta(String),

    #[error("energy increased at step {step}: dE = {increase:e} exceeds tolerance {tol:e}")]
    EnergyIncrease {
        step: usize,
        increase: f64,
        tol: f64,
    },

    #[error("insufficient snapshots: {0}")]
    InsufficientSnapshots(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

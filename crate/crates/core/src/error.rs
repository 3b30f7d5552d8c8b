use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("state violates density-operator invariants: {0}")]
    InvalidState(String),

    #[error("integration failed at t = {last_time} ns: {reason}")]
    IntegrationFailure { last_time: f64, reason: String },

    #[error("steady state is not unique (null-space dimension {nullity})")]
    NonUniqueSteadyState { nullity: usize },

    #[error("temperature {temperature} K outside model range (valid for T >= {min} K)")]
    OutOfModelRange { temperature: f64, min: f64 },

    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("normalization error: {0}")]
    Normalization(String),

    #[error("rank-deficient Jacobian; parameter `{parameter}` is not identifiable from the data")]
    RankDeficient { parameter: String },

    #[error("ingestion error in {path}: {reason}")]
    Ingestion { path: PathBuf, reason: String },

    #[error("config validation: field `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("excitation rate {requested} Mcps exceeds the lifetime bound {bound} Mcps")]
    SaturationViolation { requested: f64, bound: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name: name.to_string(), reason: reason.into() }
    }

    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. }
            | Error::Validation { .. }
            | Error::OutOfModelRange { .. }
            | Error::SaturationViolation { .. }
            | Error::Domain(_) => 2,
            Error::Ingestion { .. } => 4,
            Error::Io(_) => 4,
            _ => 3,
        }
    }
}

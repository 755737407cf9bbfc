use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function (negative radius, NaN, ...).
    #[error("input outside domain: {0}")]
    InputDomain(String),

    /// A numerical parameter is invalid (non-positive horizon, too small dimension, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Input data failed validation (kernel table, off-manifold point, ...).
    #[error("validation failed: {0}")]
    Validation(String),

    /// Bad configuration: unknown case name, malformed list, inconsistent flags.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// Not enough points to build the requested weights.
    #[error("sampling error: {0}")]
    Sampling(String),

    /// Triangulation failed even after the perturbation retry.
    #[error("degenerate triangulation at point {index}: {reason}")]
    Degenerate { index: usize, reason: String },

    /// Boundary normalisation is not positive at a boundary point.
    #[error("assembly error at boundary point {index}: omega_hat = {value:e} (horizon too large or cloud too sparse)")]
    NonPositiveOmega { index: usize, value: f64 },

    /// An interior averaging weight is not positive.
    #[error("assembly error at point {index}: omega_2 = {value:e}")]
    NonPositiveAverage { index: usize, value: f64 },

    /// A solver precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Solver did not reach the requested tolerance.
    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence(_) => 3,
            Error::Io { .. } => 4,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

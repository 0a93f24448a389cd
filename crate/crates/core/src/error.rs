use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("surface inside horizon (r={radius}, r_h={horizon})")]
    InsideHorizon { radius: f64, horizon: f64 },

    #[error("unsupported dimension n={0} (expected {1})")]
    UnsupportedDimension(usize, &'static str),

    #[error("grid mismatch: expected {expected} samples, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("poor asymptotic fit: {reason} (rms residual {residual:.3e})")]
    FitQuality { reason: String, residual: f64 },

    #[error("initial surface is not mean convex (min H = {min_h:.3e})")]
    NotMeanConvex { min_h: f64 },

    #[error("solver failure at t={t}: {reason} (dt={dt:.3e})")]
    SolverFailure { t: f64, dt: f64, reason: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("expression error at offset {offset}: {msg}")]
    Expression { offset: usize, msg: String },

    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error("invalid scenario: {0}")]
    Validation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

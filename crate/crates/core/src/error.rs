use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge (estimate {estimate:e}, error bound {error:e})")]
    Quadrature { estimate: f64, error: f64 },

    #[error("series did not converge after {terms} terms (partial sum {partial:e})")]
    SeriesDivergence { terms: usize, partial: f64 },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("characteristics crossed: t = {t} is at or beyond the lifespan {lifespan}")]
    CharacteristicFold { t: f64, lifespan: f64 },

    #[error("time step {dt:e} exceeds the CFL limit {limit:e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("solver diverged at t = {t}: {reason}")]
    Diverged { t: f64, reason: String },

    #[error("need at least {needed} stored time levels, have {have}")]
    InsufficientHistory { needed: usize, have: usize },

    #[error("field support reaches within {margin} cells of the boundary (need {needed})")]
    SupportViolation { margin: usize, needed: usize },

    #[error("l-grid spacing {spacing} is coarser than the required {required}")]
    SparseGrid { spacing: f64, required: f64 },

    #[error("monitor does not apply: {0}")]
    WrongRegime(String),

    #[error("no admissible delta0 found on the search grid")]
    NoDelta0,

    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error("bad snapshot file {path}: {reason}")]
    Snapshot { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

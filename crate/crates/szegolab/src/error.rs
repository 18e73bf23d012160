//! Crate-wide error type. Numerical failures carry the achieved quantity so
//! callers can report how far a computation got instead of a bare "failed".

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not reach tolerance {requested:e}; achieved error estimate {achieved:e}")]
    QuadratureTolerance { requested: f64, achieved: f64 },

    #[error("moment order {requested} unavailable: {reason}")]
    MomentOrder { requested: usize, reason: String },

    #[error("construction failed its stated bound: {what} achieved {achieved:e}, target {target:e}")]
    BoundViolation {
        what: String,
        achieved: f64,
        target: f64,
    },

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("cross-check disagreement in {what}: {a:e} vs {b:e} (tolerance {tol:e})")]
    CrossCheck {
        what: String,
        a: f64,
        b: f64,
        tol: f64,
    },

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("measure file: {0}")]
    MeasureFile(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

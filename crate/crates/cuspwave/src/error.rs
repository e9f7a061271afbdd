//! Library-wide error type.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum CuspError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("curve is singular at grid resolution: {0}")]
    SingularCurve(String),

    #[error("admissibility window violated: {0}")]
    Admissibility(String),

    #[error("parameter window violated: {0}")]
    Window(String),

    #[error("interface is not a graph on the requested patch: {0}")]
    NotAGraph(String),

    #[error("exponent fit unstable: {0}")]
    FitUnstable(String),

    #[error("compatibility integral violated: {0}")]
    Solvability(String),

    #[error("operator ill-conditioned: estimated condition number {0:.3e}")]
    IllConditioned(f64),

    #[error("solution blew up at step {step}: {reason}")]
    BlowUp { step: usize, reason: String },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CuspError>;

use thiserror::Error;

/// Errors produced by the numerical toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("coordinate conversion at the north pole (m_z = 1) has no finite stereographic image")]
    NorthPole,

    #[error("root finder did not converge: {0}")]
    RootFinder(String),

    #[error("bracket [{lo}, {hi}] does not straddle a sign change: {detail}")]
    Bracket { lo: f64, hi: f64, detail: String },

    #[error("trajectory escaped beyond |x| = {bound}")]
    Escaped { bound: f64 },

    #[error("generator of dimension {dim} exceeds the memory budget of {budget} unknowns")]
    Resource { dim: usize, budget: usize },

    #[error("oracle capped at spin_j = {cap}, requested {requested}")]
    OracleCap { cap: f64, requested: f64 },

    #[error("linear solve lost precision (relative correction {correction:.3e}); rerun with extended precision")]
    Precision { correction: f64 },

    #[error("singular system: zero pivot at column {0}")]
    Singular(usize),

    #[error("eigensolver did not converge: {detail}; try a nonzero shift such as {suggested_shift:e}")]
    Eigensolver { detail: String, suggested_shift: f64 },

    #[error("instanton trajectory did not return to pi_w = 0 within arclength {s_max}")]
    OpenTrajectory { s_max: f64 },

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("parameters are not in the bistable regime: {0}")]
    NotBistable(String),

    #[error("basin of attraction undecided: {0}")]
    BasinUndecided(String),

    #[error("symbolic derivation failed: {0}")]
    Derivation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Everything that can go wrong while building or checking a determinant.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot lift the zero vector")]
    ZeroVector,

    #[error("points {0} and {1} coincide")]
    CoincidentPoints(usize, usize),

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("edge lengths do not embed in 3-space: {0}")]
    NotRealizable(String),

    #[error("degenerate denominator: area {0} vanishes")]
    DegenerateDenominator(String),

    #[error("ill-conditioned interpolation: {0}")]
    IllConditioned(String),

    #[error("residual {residual:e} exceeds tolerance {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("objective undefined: {0}")]
    ObjectiveUndefined(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

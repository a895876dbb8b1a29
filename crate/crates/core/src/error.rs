use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("non-finite value {value} at cell ({i}, {j})")]
    NonFinite { i: usize, j: usize, value: f64 },

    #[error("field has {got} values, grid needs {expected}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("line too short: {0} points (need at least 3)")]
    LineTooShort(usize),

    #[error("line values and velocity differ in length ({values} vs {velocity})")]
    LineLengthMismatch { values: usize, velocity: usize },

    #[error("CFL violated: Courant number {courant} exceeds 1")]
    CflViolation { courant: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("zero velocity bound; static fields need no time stepping")]
    ZeroVelocity,

    #[error("order of accuracy needs positive errors, got {coarse} and {fine}")]
    NonPositiveError { coarse: f64, fine: f64 },

    #[error("descent diverged: cost rose for {0} consecutive iterations")]
    Diverged(usize),
}

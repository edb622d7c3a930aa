use thiserror::Error;

/// Everything that can go wrong inside the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    /// The recurrence tail did not vanish: the field is not (numerically) a
    /// finite combination of weighted basis elements.
    #[error("field is outside the weighted span (residual {residual:.3e}, tolerance {tol:.1e})")]
    OutOfSpan { residual: f64, tol: f64 },

    #[error("numeric breakdown at t = {time}: {reason}")]
    Breakdown { time: f64, reason: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("bound violated: {0}")]
    BoundViolation(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

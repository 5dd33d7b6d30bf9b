use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lexical error at offset {position}: unexpected character {found:?}")]
    Lex { position: usize, found: char },

    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },

    /// Evaluation left the real domain (log/sqrt of a negative, division by
    /// zero, overflow).
    #[error("domain error at t = {t}: {reason} in `{expr}`")]
    Domain { t: f64, expr: String, reason: String },

    #[error("`{expr}` is not differentiable symbolically: {reason}")]
    NotDifferentiable { expr: String, reason: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("length mismatch: expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid tolerances: {0}")]
    InvalidTolerances(String),

    #[error("integration failed at t = {t}: {message}")]
    Integration { t: f64, message: String },

    #[error("no sign change on [{left}, {right}]")]
    NoSignChange { left: f64, right: f64 },

    /// A documented precondition of an operation does not hold.
    #[error("{0}")]
    Precondition(String),
}

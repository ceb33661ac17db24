use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the solver and algebra layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {context}: expected {expected}, got {got}")]
    ShapeMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("cutoff {cutoff} needs at least {needed} time samples, got {got}")]
    TooFewSamples {
        cutoff: usize,
        needed: usize,
        got: usize,
    },

    #[error("{what} = {value} is outside {range}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("element does not belong to this algebra ({0})")]
    AlgebraMismatch(&'static str),

    #[error("invalid algebra data: {0}")]
    InvalidAlgebra(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate critical set: {0}")]
    Degenerate(String),
}

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("{0}: zero input is not allowed")]
    ZeroInput(&'static str),

    #[error("{0}: constant input is not allowed")]
    ConstantInput(&'static str),

    #[error("not a closed point: {0}")]
    NotAPlace(String),

    #[error("factor {residual} is not supported on the basis")]
    Unsupported { residual: String },

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("dimension mismatch: formula gives {formula}, linear algebra gives {computed}")]
    DimensionMismatch { formula: usize, computed: usize },

    #[error("cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded { what: &'static str, needed: usize, cap: usize },

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

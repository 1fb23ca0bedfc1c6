use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("variable index x{index} out of range (allowed 1..={max})")]
    VariableIndex { index: u64, max: u32 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} = {value} exceeds cap {cap}")]
    CapExceeded { what: &'static str, value: u64, cap: u64 },

    #[error("degree {degree} exceeds the supported maximum {max}")]
    DegreeTooHigh { degree: u32, max: u32 },

    #[error("inconsistent affine constraints")]
    Inconsistent,

    #[error("constraint polynomial is not affine (degree {0})")]
    NonLinearConstraint(u32),

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("growth function violated: {0}")]
    NotGrowth(String),

    #[error("step budget of {0} exhausted")]
    BudgetExceeded(u64),

    #[error("certificate does not witness an irregularity")]
    NotAViolation,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}

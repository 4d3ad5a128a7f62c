use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unsupported construct: {0}")]
    UnsupportedConstruct(String),
    #[error("step budget of {limit} star unfoldings exceeded (suspected divergence)")]
    BudgetExceeded { limit: usize },
    #[error("undefined: {0}")]
    Undefined(String),
    #[error("program is not deterministic: {0}")]
    NotDeterministic(String),
    #[error("index {index} out of range for canonical form of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("the marked occurrence is not evaluated at this valuation")]
    OccurrenceNotEvaluated,
    #[error("formula is not in normal form")]
    NotNormalForm,
    #[error("invalid formula path: {0}")]
    InvalidPath(String),
    #[error("the occurrence has no side effect at its evaluation point")]
    NoSideEffect,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("translation is only defined for finite instruction sequences")]
    UnsupportedRepetition,
    #[error("complex test {0} must be projected before behavior extraction")]
    NotProjected(String),
    #[error("unknown schema {0}")]
    UnknownSchema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

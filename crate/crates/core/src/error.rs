use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds 2^61")]
    ModulusTooLarge(u64),
    #[error("division by zero in F({0})")]
    DivisionByZero(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear system is inconsistent")]
    Inconsistent,

    #[error("invalid design parameters: {0}")]
    InvalidDesign(String),
    #[error("design check failed: {0}")]
    DesignViolation(String),

    #[error("invalid code parameters: {0}")]
    InvalidParams(String),
    #[error("field F({q}) too small: {reason}")]
    FieldTooSmall { q: u64, reason: String },
    #[error("combinatorial budget exceeded: {count} subsets > cap {cap}")]
    BudgetExceeded { count: u128, cap: u128 },
    #[error(
        "no verified S found after {failures} failed candidates (existence threshold C(n,k)*T*M = {threshold}, q = {q})"
    )]
    SynthesisExhausted { failures: usize, threshold: u128, q: u64 },
    #[error("rank witness failed: {0}")]
    Witness(String),

    #[error("message length {got} does not match M = {expected}")]
    MessageLength { expected: usize, got: usize },
    #[error("missing helper data: {0}")]
    MissingHelper(String),
    #[error("corrupt or mismatched share: {0}")]
    CorruptShare(String),
    #[error("need exactly {expected} distinct shares, got {got}")]
    ShareCount { expected: usize, got: usize },
    #[error("decoding system has rank {rank} < M = {m}")]
    RankDeficient { rank: usize, m: usize },

    #[error("invalid analysis input: {0}")]
    Analysis(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("format error: {0}")]
    Format(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("truncation orders differ: {0:?} vs {1:?}")]
    OrderMismatch(Option<i32>, Option<i32>),
    #[error("composition argument {0} has a nonzero constant term")]
    ConstantTerm(usize),
    #[error("exponent {0:?} not allowed in a power series")]
    NegativeExponent(Vec<i32>),
    #[error("linear part is singular")]
    SingularLinearPart,
    #[error("symplectic identity violated: {0}")]
    Symplectic(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("degenerate: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

use crate::model::Diagnostic;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operands live in different rings")]
    RingMismatch,
    #[error("element has a nonzero scalar part")]
    NotNilpotent,
    #[error("Chern roots must be of pure degree 2")]
    NotDegreeTwo,
    #[error("weight 0 is not allowed here")]
    ZeroWeight,
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("bad polynomial expression: {0}")]
    Expression(String),
    #[error("not a Laurent polynomial: {0}")]
    NotAPolynomial(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid presentation: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("component `{0}` is not indefinite")]
    NotIndefinite(String),
    #[error("component `{0}` does not lie on the zero level")]
    NotAtZeroLevel(String),
    #[error("oracle limit exceeded: {0}")]
    OracleLimit(String),
    #[error("insufficient range: {0}")]
    InsufficientRange(String),
    #[error("pole cancellation failed near x = 0: {0}")]
    CancellationFailure(String),
    #[error("test function provides derivatives up to order {available}, {needed} needed")]
    MissingDerivatives { available: usize, needed: usize },
    #[error("x must be nonzero")]
    ZeroArgument,
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::presentation::PreconditionFailure;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("cannot differentiate by parameter `{0}`")]
    ParameterDerivative(String),
    #[error("index {index} out of range 1..={arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("reduction budget of {limit} steps exceeded")]
    Budget { limit: u64 },
    #[error("the ideal is the unit ideal (empty variety)")]
    UnitIdeal,
    #[error("wrong dimension: expected {expected}, found {found}")]
    WrongDimension { expected: String, found: String },
    #[error("not expressible: {0}")]
    NotExpressible(String),
    #[error("precondition failed: {0}")]
    Precondition(Box<PreconditionFailure>),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

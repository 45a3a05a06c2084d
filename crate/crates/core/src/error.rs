use thiserror::Error;

use crate::relations::Counterexample;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix of size {rows}x{cols} exceeds the dimension limit of {limit}")]
    SizeLimit { rows: usize, cols: usize, limit: usize },
    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("matrix is not column-stochastic: {0}")]
    NotStochastic(String),
    #[error("matrix is not logical: {0}")]
    NotLogical(String),
    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("undeclared identifier `{0}`")]
    UndeclaredIdentifier(String),
    #[error("invalid network definition: {0}")]
    InvalidNetwork(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("relation is not an equivalence: {0}")]
    NotEquivalence(String),
    #[error("lumpability condition violated: {0}")]
    NotLumpable(Box<Counterexample>),
    #[error("cost table is not constant on block {block:?}: {first} vs {second}")]
    CostInconsistent {
        block: Vec<usize>,
        first: f64,
        second: f64,
    },
    #[error("target set is empty")]
    EmptyTarget,
    #[error("invalid costs: {0}")]
    InvalidCosts(String),
    #[error("controller does not match the model: {0}")]
    ControllerMismatch(String),
    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),
}

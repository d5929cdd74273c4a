use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("undefined sum: (+inf) + (-inf)")]
    UndefinedSum,
    #[error("undefined subtraction: inf - inf with equal signs")]
    UndefinedSubtraction,
    #[error("set function takes both +inf and -inf: {0}")]
    MixedInfinities(String),
    #[error("malformed lattice: {0}")]
    MalformedLattice(String),
    #[error("set function is not total on the model: missing {0}")]
    NotTotal(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("order violated: {0}")]
    OrderViolated(String),
    #[error("search budget exceeded on {context}: bounds [{lo}, {hi}]")]
    SearchBudgetExceeded {
        context: String,
        lo: String,
        hi: String,
    },
    #[error("value is infinite where a finite one is required: {0}")]
    InfiniteValue(String),
    #[error("norm is infinite")]
    NormInfinite,
    #[error("negative weight: {0}")]
    NegativeWeight(String),
    #[error("bad marked cells: {0}")]
    BadMarkedCells(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

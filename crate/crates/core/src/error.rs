use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("argument {0} outside (0,1]")]
    OutOfDomain(String),
    #[error("tail mass {tail} exceeds the smallest materialized length at depth {depth}; materialize deeper")]
    TailDominates { depth: usize, tail: String },
    #[error("depth error: {0}")]
    Depth(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("oracle limit: {0} cells exceeds the exhaustive-search cap of 8")]
    OracleLimit(usize),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("witness unavailable: {0}")]
    WitnessUnavailable(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::operators::DomainReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("topology mismatch: {0}")]
    TopologyMismatch(String),

    #[error("operator {operator} is not defined on a {topology} grid")]
    IncompatibleOperator { operator: String, topology: String },

    #[error("state has zero norm")]
    DegenerateState,

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    /// The state is outside the domain of an operator; the report is the evidence.
    #[error("inapplicable: state not in the domain of {} ({:?})", .0.operator, .0.reason)]
    Inapplicable(Box<DomainReport>),

    #[error("invalid sample set: {0}")]
    InvalidSampleSet(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("grid has {n} points, oracle cap is {cap}")]
    OracleCapExceeded { n: usize, cap: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

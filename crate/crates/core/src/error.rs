use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 1, got {0}")]
    InvalidDimension(usize),

    #[error("degree selector p must be a positive number, got {0}")]
    InvalidDegreeSelector(String),

    #[error("multi-index set is empty")]
    EmptySet,

    #[error("multi-index {0:?} has length {1}, expected dimension {2}")]
    IndexLength(Vec<usize>, usize, usize),

    #[error("multi-index set is not downward closed: {missing:?} is missing below {index:?}")]
    NotDownwardClosed { index: Vec<usize>, missing: Vec<usize> },

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("back neighbour needs j < alpha_{axis} = {bound}, got j = {j}")]
    BackNeighbor { axis: usize, j: usize, bound: usize },

    #[error("multi-index {0:?} is not a member of the set")]
    NotInSet(Vec<usize>),

    #[error("expected {expected} axes, got {got}")]
    AxisCount { expected: usize, got: usize },

    #[error("axis {axis} has {got} points but the index set needs at least {needed}")]
    AxisTooShort { axis: usize, needed: usize, got: usize },

    #[error("duplicate node {value} at positions {first} and {second}")]
    DuplicateNode { value: f64, first: usize, second: usize },

    #[error("node {value} at position {position} lies outside [-1, 1] or is not finite")]
    NodeOutOfRange { value: f64, position: usize },

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value {value} at node {index:?} = {node:?}")]
    NonFiniteSample { index: Vec<usize>, node: Vec<f64>, value: f64 },

    #[error("non-finite coefficient {value} at position {position}")]
    NonFiniteCoefficient { position: usize, value: f64 },

    #[error("divided difference divisor {divisor:e} on axis {axis} is below the conditioning guard")]
    DegenerateDivisor { axis: usize, divisor: f64 },

    #[error("instance of size {size} exceeds the configured cap {cap}")]
    TooLarge { size: usize, cap: usize },

    #[error("{function} has no analytic derivative of order {order:?}")]
    UnsupportedDerivative { function: String, order: Vec<usize> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("need at least {needed} usable rows for a rate fit, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degree {degree}: {source}")]
    AtDegree {
        degree: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed input {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for errors caused by invalid caller input, as opposed to a
    /// numerical breakdown or an I/O failure.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::DegenerateDivisor { .. }
            | Error::NonFiniteCoefficient { .. }
            | Error::NonFiniteSample { .. }
            | Error::InsufficientData { .. }
            | Error::Io { .. } => false,
            Error::AtDegree { source, .. } => source.is_validation(),
            _ => true,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format { path: path.into(), reason: reason.into() }
    }
}

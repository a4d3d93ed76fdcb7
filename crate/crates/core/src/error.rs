use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the diagnosis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("DPI file line {line}: {message}")]
    DpiSyntax { line: usize, message: String },

    #[error("duplicate axiom label `{0}`")]
    DuplicateLabel(String),

    #[error("missing section [{0}]")]
    MissingSection(&'static str),

    #[error("solver exceeded its decision budget of {budget}")]
    ResourceLimit { budget: u64 },

    #[error("unknown axiom label `{0}`")]
    UnknownLabel(String),

    #[error("diagnosis problem has no diagnosis")]
    Unsolvable,

    #[error("belief vector has zero total mass")]
    ZeroMass,

    #[error("no probability for sub-component `{0}`")]
    MissingSubComponent(String),

    #[error("query pool is empty")]
    EmptyPool,

    #[error("RIO measure requires a RIO state")]
    MissingRioState,

    #[error("invalid q-partition: {0}")]
    InvalidPartition(String),

    #[error("infeasible generator parameters: {0}")]
    InfeasibleParams(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("mean is zero")]
    ZeroMean,

    #[error("invalid value `{value}` for {what}")]
    InvalidValue { what: &'static str, value: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid uncertain value {0}")]
    InvalidValue(String),

    #[error("division by an uncertain value with zero mean")]
    DivisionByZero,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("simulation fault at t = {time} s: {detail}")]
    SimulationFault { time: f64, detail: String },

    #[error("reset would increase box temperature uncertainty ({current} -> {requested})")]
    ResetIncreasesUncertainty { current: f64, requested: f64 },

    #[error("contradictory certain evidence: {0} and {1} both have zero uncertainty")]
    ContradictoryEvidence(f64, f64),

    #[error("{0} requires a non-empty input")]
    EmptyInput(&'static str),

    #[error("traces do not share a time grid: {0}")]
    MismatchedGrid(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

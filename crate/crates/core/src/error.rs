use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad or missing input data, schema problems, invalid configuration.
    Input,
    /// A well-formed request that could not be computed.
    Computation,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("schema error: missing column \"{column}\"")]
    MissingColumn { column: String },

    #[error("line {line}: cannot parse {column} value {value:?}")]
    Parse {
        line: u64,
        column: String,
        value: String,
    },

    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("no observations in {0}")]
    NoObservations(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("singular design: column(s) {} are collinear with earlier columns", .columns.join(", "))]
    Singular { columns: Vec<String> },

    #[error("simulation error in trial {trial}, day {day}: {message}")]
    Simulation {
        trial: u64,
        day: usize,
        message: String,
    },

    #[error("{failed} trial(s) failed; first: {first}")]
    TrialsFailed { failed: usize, first: Box<Error> },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. }
            | Error::Csv(_)
            | Error::MissingColumn { .. }
            | Error::Parse { .. }
            | Error::DuplicateDate(_)
            | Error::Validation(_)
            | Error::NoObservations(_) => ErrorKind::Input,
            Error::Domain(_)
            | Error::InsufficientData(_)
            | Error::Singular { .. }
            | Error::Simulation { .. }
            | Error::TrialsFailed { .. } => ErrorKind::Computation,
        }
    }
}

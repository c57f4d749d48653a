use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("ARFF line {line}: {message}")]
    Arff { line: usize, message: String },

    #[error("label list: {0}")]
    LabelXml(String),

    #[error("label `{0}` from the label list is not an attribute of the ARFF file")]
    MissingLabel(String),

    #[error("row {row}, column {column}: label value `{value}` is not 0 or 1")]
    InvalidLabel {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}, column {column}: `{value}` is not a number")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("CSV: {0}")]
    Csv(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0} labels exceed the powerset limit of {1}")]
    TooManyLabels(usize, usize),

    #[error("no prototype centers: every label lacks positive training instances")]
    NoPrototypes,

    #[error("least-squares system is singular; use a ridge > 0")]
    Singular,

    #[error("model file: {0}")]
    Model(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_) => ErrorKind::Config,
            Error::NoPrototypes | Error::Singular => ErrorKind::Numeric,
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

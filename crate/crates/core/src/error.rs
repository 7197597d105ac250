use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("invalid degree {degree} for ambient dimension {n}")]
    InvalidDegree { degree: usize, n: usize },

    #[error("codifferential of a 0-form is undefined")]
    CodifferentialOfZeroForm,

    #[error("invalid multi-index {0:?}")]
    InvalidMultiIndex(Vec<usize>),

    #[error("ill-typed composition: {0}")]
    IllTyped(String),

    #[error("rewrite budget of {0} steps exceeded")]
    BudgetExceeded(usize),

    #[error("parse error at token {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("support violation: form does not vanish on a {margin}-node margin")]
    SupportViolation { margin: usize },

    #[error("kernel singularity at the origin")]
    Singularity,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("incomplete boundary trace: {0}")]
    IncompleteTrace(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

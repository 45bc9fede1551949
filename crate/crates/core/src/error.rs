use thiserror::Error;

use crate::aggregation::MetricId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("no data: {0}")]
    NoData(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("incomplete score: metric {0} missing")]
    IncompleteScore(MetricId),

    #[error("missing label: {0}")]
    MissingLabel(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        if err.is_io() {
            return Error::Io(std::io::Error::other(err.to_string()));
        }
        Error::Parse { line: err.line(), column: err.column(), message: err.to_string() }
    }

    /// True for failures caused by the filesystem rather than the input content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}

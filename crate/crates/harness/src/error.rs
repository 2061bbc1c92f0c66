use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {col}: {value:?} is not a number")]
    NonNumericCell { row: usize, col: usize, value: String },
    #[error("no data rows in {0}")]
    EmptyData(PathBuf),
    #[error("samples are degenerate: {0}")]
    DegenerateSamples(String),
    #[error("summary does not match the expected schema: {0}")]
    SchemaMismatch(String),
    #[error("experiment file line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error("{method}, replicate {replicate}: {source}")]
    Method {
        method: String,
        replicate: usize,
        #[source]
        source: boostnys::Error,
    },
    #[error(transparent)]
    Core(#[from] boostnys::Error),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}

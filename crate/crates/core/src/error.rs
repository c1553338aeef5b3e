use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("backward called without a matching forward cache")]
    MissingCache,

    #[error("invalid range [{low}, {high}): low must be below high")]
    InvalidRange { low: f64, high: f64 },

    #[error("ranges [{0}, {1}) and [{2}, {3}) overlap")]
    OverlappingRanges(f64, f64, f64, f64),

    #[error("series of length {len} is too short for window {window}")]
    SeriesTooShort { len: usize, window: usize },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed csv {path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("column '{column}' not found in {path}")]
    ColumnNotFound { path: PathBuf, column: String },

    #[error("row {row}, column '{column}': cannot parse '{value}' as a number")]
    ParseCell {
        row: usize,
        column: String,
        value: String,
    },
}

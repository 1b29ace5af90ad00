use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to decode image: {0}")]
    Decode(String),

    #[error("unsupported color conversion from {from:?} to {to:?}")]
    UnsupportedConversion {
        from: crate::imgcore::ColorSpace,
        to: crate::imgcore::ColorSpace,
    },

    #[error("gaussian sigma must be positive, got {0}")]
    InvalidSigma(f64),

    #[error("image is {width}x{height}, need at least {min_width}x{min_height}")]
    TooSmall {
        width: usize,
        height: usize,
        min_width: usize,
        min_height: usize,
    },

    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("degenerate image: {0}")]
    DegenerateImage(&'static str),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("duplicate listing id {0}")]
    DuplicateId(u64),

    #[error("empty input")]
    EmptyInput,

    #[error("class {label} has {count} member(s); stratified split needs at least 2")]
    InsufficientClassMembers { label: u8, count: usize },

    #[error("labels contain a single class")]
    DegenerateLabels,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },

    #[error("{path}: {source}")]
    Path {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn too_small(width: usize, height: usize, min: usize) -> Self {
        Error::TooSmall {
            width,
            height,
            min_width: min,
            min_height: min,
        }
    }

    pub(crate) fn at_path(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Path {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("I/O error: {0}")]
    Stream(#[from] std::io::Error),
    #[error("file size {len} is not a multiple of the {stride}-byte frame stride")]
    GeometryMismatch { len: u64, stride: u64 },
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("image decode error: {0}")]
    Image(#[from] image::ImageError),
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("region {region} lies outside the {width}x{height} field")]
    RegionOutOfBounds {
        region: String,
        width: usize,
        height: usize,
    },
    #[error("score window is empty")]
    EmptyWindow,
    #[error("no input frames")]
    EmptyInput,
    #[error("displacement ({dx}, {dy}) leaves no overlap")]
    EmptyOverlap { dx: isize, dy: isize },
    #[error("no neighbor blocks available for estimation")]
    NoNeighbors,
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
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

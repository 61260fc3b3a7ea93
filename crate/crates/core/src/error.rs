use thiserror::Error;

/// Errors produced anywhere in the protection pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A chart specification violated one of its invariants.
    #[error("invalid chart spec: {0}")]
    InvalidSpec(String),

    /// A numeric parameter was outside its accepted range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two images that must share dimensions did not.
    #[error("dimension mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    DimensionMismatch {
        left_w: u32,
        left_h: u32,
        right_w: u32,
        right_h: u32,
    },

    /// Mark geometry could not be recovered from a raster.
    #[error("extraction failed: {0}")]
    Extraction(String),

    #[error("png: {0}")]
    Png(String),

    #[error("metric manifest: {0}")]
    Manifest(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn spec(msg: impl Into<String>) -> Self {
        Error::InvalidSpec(msg.into())
    }
}

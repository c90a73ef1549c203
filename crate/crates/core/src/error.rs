use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),

    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },

    #[error("non-finite value at flat index {0}")]
    NonFiniteValue(usize),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("bad label map: {0}")]
    BadLabels(String),

    #[error("no annotated pixels in label map")]
    EmptyAnnotation,

    #[error("bad kernel size {size} for signal length {len} (must be odd and <= length)")]
    BadKernelSize { size: usize, len: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("bad config: {0}")]
    BadConfig(String),

    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },

    #[error("k = {k} exceeds the available {max}")]
    KTooLarge { k: usize, max: usize },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("singular system while solving column {0}")]
    SingularSystem(usize),

    #[error("empty training set")]
    EmptyTrainSet,

    #[error("empty confusion matrix")]
    EmptyConfusion,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::ShapeMismatch(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::BadConfig(msg.into())
    }
}

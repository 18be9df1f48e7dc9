use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("reference point is not strictly inside the ellipse (offset {dx}, {dy})")]
    CenterOutsideEllipse { dx: f64, dy: f64 },

    #[error("observation is empty or has no unmasked pixels")]
    EmptyObservation,

    #[error("observation arrays disagree in length: {0}")]
    LengthMismatch(String),

    #[error("pixel {index} has non-binary intensity {value}")]
    NonBinaryIntensity { index: usize, value: f64 },

    #[error("posterior summary needs at least 2 kept samples, got {0}")]
    TooFewSamples(usize),

    #[error("image has zero dynamic range")]
    FlatImage,

    #[error("failed to decode image {path}: {message}")]
    ImageDecode { path: PathBuf, message: String },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cutoff {cutoff} too small: captured norm {captured:.6} below required {required}")]
    Truncation {
        cutoff: usize,
        captured: f64,
        required: f64,
    },

    #[error("degenerate circuit output: o0 + o1 = {0:e}")]
    DegenerateOutput(f64),

    #[error("non-finite loss at step {step} (probable leakage above the Fock cutoff)")]
    NonFiniteLoss { step: usize },

    #[error("evaluation failed at grid point ({x}, {y}): {source}")]
    Grid {
        x: f64,
        y: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("png: {0}")]
    Png(#[from] png::EncodingError),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

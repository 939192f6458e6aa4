use thiserror::Error;

/// Errors produced by the codec, packer and scanner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no valid cut found after {attempts} attempts")]
    CutFailure { attempts: usize },

    #[error("tree with total footprint {total_footprint} cannot be packed above phi = {min_phi:.3e}")]
    Unpackable { total_footprint: u64, min_phi: f64 },

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

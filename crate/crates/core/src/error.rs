use std::path::PathBuf;
use std::time::Duration;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("manifest schema error at line {line}, column {column}: {message}")]
    Schema {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error in scene '{scene}': {message}")]
    Validation { scene: String, message: String },

    #[error("degenerate region '{region}': {reason}")]
    DegenerateRegion { region: String, reason: String },

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (u32, u32),
        actual: (u32, u32),
    },

    #[error("channel mismatch: expected {expected} channels, got {actual}")]
    ChannelMismatch { expected: usize, actual: usize },

    #[error("empty mask: {0}")]
    EmptyMask(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("backend error: {message}{}", fmt_stderr(.stderr))]
    Backend { message: String, stderr: String },

    #[error("backend timed out after {0:?}")]
    Timeout(Duration),

    #[error("unknown scene '{0}'")]
    UnknownScene(String),

    #[error("missing input: {0}")]
    Missing(String),

    #[error("image error for {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("invalid PFM data: {0}")]
    Pfm(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn fmt_stderr(stderr: &str) -> String {
    let trimmed = stderr.trim();
    if trimmed.is_empty() {
        String::new()
    } else {
        format!(" (stderr: {trimmed})")
    }
}

impl Error {
    pub(crate) fn validation(scene: &str, message: impl Into<String>) -> Self {
        Error::Validation {
            scene: scene.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::Config(message.into())
    }

    /// Errors that originate from the manifest or configuration rather than
    /// from processing a particular scene.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::Schema { .. } | Error::Validation { .. } | Error::Config(_)
        )
    }
}

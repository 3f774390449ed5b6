use thiserror::Error;

/// Errors reported by model construction and measurement operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input (unknown vertex, bad weight, ...).
    #[error("input error: {0}")]
    Input(String),
    /// An operation was asked to exceed a configured resource cap.
    #[error("resource limit: {0}")]
    Resource(String),
    /// Structurally valid input produced degenerate data (e.g. coincident
    /// boundary proxies from an insufficient horoball depth).
    #[error("data error: {0}")]
    Data(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status for the CLI: input-shaped problems exit 1.
    pub fn exit_code(&self) -> i32 {
        1
    }
}

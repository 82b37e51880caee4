use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema: {0}")]
    Schema(String),

    #[error("data: {0}")]
    Data(String),

    #[error("csv parse failure: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("design: {0}")]
    Design(String),

    #[error("fit: {0}")]
    Fit(String),

    #[error("clustering: {0}")]
    Clustering(String),

    #[error("grasp: {0}")]
    Grasp(String),

    #[error("proximity: {0}")]
    Proximity(String),
}

pub type Result<T> = std::result::Result<T, Error>;

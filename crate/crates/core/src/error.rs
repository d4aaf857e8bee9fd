//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field construction failed: {0}")]
    Field(String),

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("matrix is not nilpotent")]
    NotNilpotent,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("expected a {expected}-subset, got {actual} elements")]
    Cardinality { expected: usize, actual: usize },
    #[error("malformed input: {0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status for the command line tool: 3 for guards, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Guard(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

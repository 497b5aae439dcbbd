use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("matrix is not capped; cap it before computing a graphcode")]
    Uncapped,

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("instance has {rows} rows, the brute-force oracle is limited to {limit}")]
    TooLarge { rows: usize, limit: usize },

    #[error(
        "could not place shape {shape} after {attempts} attempts; try smaller radii or a smaller separation"
    )]
    Placement { shape: usize, attempts: usize },

    #[error("complex exceeds {limit} simplices; lower r_max")]
    SimplexBudget { limit: usize },

    #[error("{0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }
}

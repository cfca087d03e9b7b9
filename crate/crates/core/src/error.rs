use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid patch id {0}")]
    InvalidPatchId(usize),
    #[error("invalid node id {0}")]
    InvalidNodeId(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vertex sets differ in size: {0} vs {1}")]
    VertexCountMismatch(usize, usize),
    #[error("graph needs at least {needed} vertices, has {found}")]
    TooFewVertices { needed: usize, found: usize },
    #[error("vertex set {0:?} does not induce a clique")]
    NotAClique(Vec<usize>),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("instance has no local coordinates")]
    MissingCoordinates,
    #[error("malformed instance: {0}")]
    MalformedInstance(String),
    #[error("empty point set")]
    EmptyInput,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = CoreError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CoreError {
    /// A line of a text input could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The adjacency document is structurally wrong.
    #[error("invalid adjacency document: {0}")]
    Adjacency(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A caller broke a documented precondition, e.g. a message from a vertex
    /// that is not a neighbour, or a core map that misses vertices.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The simulation itself failed (worker panic, runtime failure).
    #[error("engine failure: {0}")]
    Engine(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CoreError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        CoreError::InvalidArgument(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        CoreError::Contract(msg.into())
    }
}

use thiserror::Error;

/// Errors raised by the solver, the problem catalog and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("evaluation error in cell {cell}: {what}")]
    Evaluation { cell: usize, what: String },

    #[error("numerical breakdown at cell {cell}, direction {direction}: {what}")]
    Breakdown {
        cell: usize,
        direction: usize,
        what: String,
    },

    #[error("divergence at cell {cell}, direction {direction}: non-finite flux")]
    Divergence { cell: usize, direction: usize },

    #[error("dense system has {unknowns} unknowns, above the cap of {cap}")]
    TooLarge { unknowns: usize, cap: usize },

    #[error("singular matrix in {0}")]
    Singular(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

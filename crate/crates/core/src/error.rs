use thiserror::Error;

/// Everything that can go wrong across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("graph is not bipartite: {0}")]
    NotBipartite(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid gadget library: {0}")]
    InvalidLibrary(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("not a deviation: {0} is a regular play square")]
    NotADeviation(String),
    #[error("invalid puzzle pieces: {0}")]
    InvalidPieces(String),
    #[error("gadget synthesis failed: {0}")]
    SynthesisFailure(String),
    #[error("instance generation failed: {0}")]
    GenerationFailure(String),
    #[error("game too large for the bitset solver: {0} squares (max 128)")]
    TooLarge(usize),
    #[error("{0}")]
    Mismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

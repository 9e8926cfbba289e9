use thiserror::Error;

/// Errors raised by the library.
///
/// `Refuted` is reserved for mathematical refutations (an invalid transfer map,
/// a non-excellent facet); the CLI maps it to exit code 2.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid root datum: {0}")]
    InvalidDatum(String),
    #[error("lattice error: {0}")]
    Lattice(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("size bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
    #[error("not in M: {0}")]
    NotInM(String),
    #[error("not residual: {0}")]
    NotResidual(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("refuted: {0}")]
    Refuted(String),
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

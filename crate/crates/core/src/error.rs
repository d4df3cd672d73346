use std::io;

/// Errors raised by the enclosure library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid user-supplied configuration (unknown names, bad grid specs, out-of-range tolerances).
    #[error("configuration error: {0}")]
    Config(String),
    /// Evaluation outside the domain of a formula (coincident kernel points, singularities).
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested combination is valid mathematically but not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

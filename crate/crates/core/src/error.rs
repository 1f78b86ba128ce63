use thiserror::Error;

/// Errors raised anywhere in the transceiver chain.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("length error: expected at least {expected} samples, got {actual}")]
    Length { expected: usize, actual: usize },

    #[error("cell ({m}, {n}) is within {guard} symbols of the frame edge")]
    Boundary { m: usize, n: usize, guard: usize },

    #[error("singular neutralization system: {0}")]
    Singular(String),

    #[error("ill-conditioned pilot: coupling coefficient {0:.3e} is below the negligible floor")]
    IllConditioned(f64),

    #[error("division by zero-magnitude pilot target")]
    ZeroTarget,

    #[error("no pilots available for interpolation")]
    NoPilots,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown {what} `{name}`")]
    UnknownName { what: &'static str, name: String },

    #[error("bit index {index} out of range for {bits_per_symbol} bits per symbol")]
    BitIndex { index: usize, bits_per_symbol: usize },

    #[error("{what}: expected length {expected}, got {actual}")]
    Length {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("desired-user channel is zero on tone {tone}; nulling projection undefined")]
    ZeroChannel { tone: usize },

    #[error("no tones to classify")]
    EmptyWindow,

    #[error("interference covariance is singular after regularization")]
    SingularCovariance,

    #[error("need at least {min} pilots, got {actual}")]
    TooFewPilots { min: usize, actual: usize },

    #[error("invalid profile: {0}")]
    Profile(String),

    #[error("invalid correlation coefficient {0} (must lie in [0, 1))")]
    Correlation(f64),

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

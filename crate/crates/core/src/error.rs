use std::path::PathBuf;

use thiserror::Error;

use crate::exact::ParseError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("insufficient precision: about {required_digits} decimal digits required")]
    Precision { required_digits: u32 },
    #[error("truncation too low: orders {missing_orders:?} are not determined")]
    UnderDetermined { missing_orders: Vec<i64> },
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
    #[error("invalid slice: {0}")]
    InvalidSlice(String),
    #[error("unknown export format {0:?}")]
    UnknownFormat(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    /// Short machine-readable tag, used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidMap(_) => "invalid-map",
            Error::Domain(_) => "domain",
            Error::Precision { .. } => "precision",
            Error::UnderDetermined { .. } => "under-determined",
            Error::Inconsistent(_) => "inconsistent",
            Error::InvalidSlice(_) => "invalid-slice",
            Error::UnknownFormat(_) => "unknown-format",
            Error::Io { .. } => "io",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

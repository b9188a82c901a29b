use std::path::PathBuf;

use thiserror::Error;

use crate::assertion::{AssertionParseError, NotFlat};
use crate::syntax::{ParseError, ValidationReport};

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("invalid language definition:\n{0}")]
    Validation(ValidationReport),
    #[error("{0}")]
    Assertion(#[from] AssertionParseError),
    #[error("{0}")]
    NotFlat(#[from] NotFlat),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Process exit status for this error: 1 for validation findings,
    /// 2 for everything that prevents reading the input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use std::fmt;
use std::path::PathBuf;

use crate::graph::Mode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid {mode} reference {index} (graph has {count} {mode} nodes)")]
    InvalidNode { mode: Mode, index: usize, count: usize },

    #[error("node mode mismatch: expected {expected}, got {actual}")]
    ModeMismatch { expected: Mode, actual: Mode },

    #[error("empty input: {0}")]
    Empty(&'static str),

    /// The requested quantity has no value for this input (zero variance,
    /// zero strength, all-tied ranks, ...).
    #[error("undefined: {0}")]
    Undefined(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Load(#[from] LoadError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn undefined(msg: impl Into<String>) -> Self {
        Error::Undefined(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad input data or arguments, as opposed to
    /// a computation that has no defined result.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Undefined(_))
    }
}

/// One problem found while reading an input file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// 1-based line number in the source file (0 when not tied to a line).
    pub line: u64,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// All violations found in a file. Loading is all-or-nothing, so the whole
/// file is scanned before this is returned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadError {
    pub source_name: String,
    pub violations: Vec<Violation>,
}

impl LoadError {
    pub fn single(source_name: impl Into<String>, line: u64, message: impl Into<String>) -> Self {
        LoadError {
            source_name: source_name.into(),
            violations: vec![Violation {
                line,
                message: message.into(),
            }],
        }
    }
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "failed to load {} ({} problem{})",
            self.source_name,
            self.violations.len(),
            if self.violations.len() == 1 { "" } else { "s" }
        )?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for LoadError {}

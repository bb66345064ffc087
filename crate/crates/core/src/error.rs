use std::path::PathBuf;

use thiserror::Error;

use crate::world::AntId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WorldError {
    #[error("seeker mark out of sequence for ant {owner}: expected seq {expected}, got {got}")]
    SeekerSequence { owner: AntId, expected: u32, got: u32 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown {what} `{value}` (expected one of: {expected})")]
pub struct ParseKindError {
    pub what: &'static str,
    pub value: String,
    pub expected: &'static str,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("{}unknown config key `{key}`", at(*line))]
    UnknownKey { line: usize, key: String },
    #[error("{}expected `key = value`, found `{text}`", at(*line))]
    Syntax { line: usize, text: String },
    #[error("{}cannot parse `{value}` for `{key}`: {reason}", at(*line))]
    Value {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },
}

/// Location prefix of a config error; line 0 is a single `set` call.
fn at(line: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!("line {line}: ")
    }
}

impl ConfigError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("series lengths differ: `{first}` has {first_len} points, `{other}` has {other_len}")]
    LengthMismatch {
        first: String,
        first_len: usize,
        other: String,
        other_len: usize,
    },
    #[error("chart needs at least one series")]
    NoSeries,
    #[error("{}: row {row}, column {column}: {reason}", path.display())]
    Csv {
        path: PathBuf,
        row: usize,
        column: usize,
        reason: String,
    },
    #[error("unknown observable `{0}`")]
    UnknownObservable(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("cannot create {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Stream(#[from] io::Error),

    #[error("CoNLL-U line {line}: {message}")]
    Conllu { line: usize, message: String },

    #[error("invalid tree for sentence '{sent_id}': {message}")]
    Tree { sent_id: String, message: String },

    #[error("duplicate sent_id '{0}'")]
    DuplicateSentId(String),

    #[error("token index {index} out of range for sentence '{sent_id}'")]
    TokenIndex { sent_id: String, index: usize },

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("vector file line {line}: {message}")]
    Vectors { line: usize, message: String },

    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },

    #[error("row {row}: {message}")]
    Row { row: usize, message: String },

    #[error("answer offset {offset} is beyond passage length {len} (qa '{qa_id}')")]
    AnswerOffset {
        qa_id: String,
        offset: usize,
        len: usize,
    },

    #[error("rule registry: {0}")]
    Registry(String),

    #[error("evaluation: {0}")]
    Eval(String),

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}

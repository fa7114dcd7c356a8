use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Record {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("duplicate document id {0:?}")]
    DuplicateDocument(String),
    #[error("invalid document {doc_id:?}: {message}")]
    InvalidDocument { doc_id: String, message: String },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("duplicate triple key {0}")]
    DuplicateTripleKey(String),
    #[error("triple {key} references unknown document {doc_id:?}")]
    UnknownDocument { key: String, doc_id: String },
    #[error("graph file: {0}")]
    GraphFormat(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("gazetteer {name}: {message}")]
    Lexicon { name: String, message: String },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn record(
        path: impl Into<PathBuf>,
        line: usize,
        message: impl Into<String>,
    ) -> Self {
        Error::Record {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

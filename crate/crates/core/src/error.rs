use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown stage code '{0}'")]
    UnknownStage(String),

    #[error("stage {0} has no position in the canonical order")]
    UnorderedStage(&'static str),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed notebook at {json_path}: {message}")]
    MalformedNotebook {
        path: PathBuf,
        json_path: String,
        message: String,
    },

    #[error("{path}: syntax error at {source}")]
    Syntax {
        path: PathBuf,
        #[source]
        source: dspipe_pyast::ParseError,
    },

    #[error("dictionary schema error{}: {message}", entry_suffix(.entry))]
    DictionarySchema {
        entry: Option<usize>,
        message: String,
    },

    #[error("label lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("empty input")]
    EmptyInput,

    #[error("empty corpus: no pipelines to aggregate")]
    EmptyCorpus,

    #[error("{0}: no analyzable source files")]
    NoSourceFiles(PathBuf),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

fn entry_suffix(entry: &Option<usize>) -> String {
    match entry {
        Some(i) => format!(" at entry {i}"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

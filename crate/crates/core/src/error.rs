use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("articles reference unknown media: {}", .article_ids.join(", "))]
    UnresolvedMedium { article_ids: Vec<String> },

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("article `{0}` has an empty title or body")]
    EmptyText(String),

    #[error("invalid record `{id}`: {message}")]
    InvalidRecord { id: String, message: String },

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("group `{group}`: row `{id}` has dimension {found}, expected {expected}")]
    DimensionMismatch {
        group: String,
        id: String,
        expected: usize,
        found: usize,
    },

    #[error("group `{group}`: row `{id}` contains a non-finite value")]
    NonFinite { group: String, id: String },

    #[error("group `{group}` is missing ids: {}", .ids.join(", "))]
    MissingIds { group: String, ids: Vec<String> },

    #[error("feature group `{0}` is not available")]
    MissingGroup(String),

    #[error("articles lack English translations required by `{group}`: {}", .ids.join(", "))]
    MissingTranslation { group: String, ids: Vec<String> },

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("training data contains a single class")]
    SingleClass,

    #[error("class {0} has no samples")]
    EmptyClass(usize),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Input and configuration problems, as opposed to runtime failures.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::SingleClass | Error::Json(_))
    }
}

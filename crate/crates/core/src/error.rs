use std::path::PathBuf;

/// Errors produced anywhere in the OOV pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {malformed} of {total} lines malformed; wrong corpus format?")]
    MostlyMalformed { path: PathBuf, malformed: usize, total: usize },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("word `{0}` does not occur in the corpus")]
    WordNotFound(String),

    #[error("hashtag `{0}` does not occur in the corpus")]
    HashtagNotFound(String),

    #[error("no POS tags available for profile of `{0}`; run the baseline tagger or supply tags")]
    Untagged(String),

    #[error("missing dependency for featurization: {0}")]
    MissingDependency(&'static str),

    #[error("document `{0}` is not part of the topic model and fold-in is disabled")]
    UnknownDocument(String),

    #[error("index {index} out of range (len {len})")]
    OutOfRange { index: usize, len: usize },

    #[error("training data contains a single class")]
    SingleClass,

    #[error("class `{class}` has {count} members, fewer than {folds} folds")]
    TooFewMembers { class: String, count: usize, folds: usize },

    #[error("row {row} sums to {sum}, expected {expected} annotators")]
    RowSumMismatch { row: usize, sum: usize, expected: usize },

    #[error("unknown category `{0}`")]
    UnknownCategory(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

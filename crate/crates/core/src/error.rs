use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("missing required column `{0}`")]
    MissingColumn(String),
    #[error("malformed row at line {line}: {message}")]
    MalformedRow { line: u64, message: String },
    #[error("duplicate record id `{0}`")]
    DuplicateId(String),
    #[error("unknown status label `{0}`")]
    UnknownLabel(String),
    #[error("corpus of {0} documents is too small to populate train, validation and test")]
    CorpusTooSmall(usize),
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("empty dataset")]
    EmptyDataset,
    #[error("class {0} has no samples")]
    AbsentClass(usize),
    #[error("need at least two classes, found {0}")]
    SingleClass(usize),
    #[error("non-finite feature value in row {row}")]
    NonFinite { row: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("kernel gamma must be resolved against training data before use")]
    UnresolvedGamma,
    #[error("label {label} out of range for {n_classes} classes")]
    LabelOutOfRange { label: usize, n_classes: usize },
    #[error("token index {index} outside vocabulary of size {vocab_size}")]
    IndexOutOfVocabulary { index: usize, vocab_size: usize },
    #[error("impurity of an empty node")]
    EmptyNode,
    #[error("{0} is undefined when only one class is present")]
    SingleClassMetric(&'static str),
    #[error("invalid search space: {0}")]
    InvalidSearchSpace(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("all {0} trials failed")]
    AllTrialsFailed(usize),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path} at line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("corpus has {len} records, need at least 3 to split")]
    CorpusTooSmall { len: usize },

    #[error("split ratios must be positive and sum to 1 (got {0:?})")]
    BadSplitRatios((f64, f64, f64)),

    #[error("no tokens in the training corpus, cannot build a vocabulary")]
    EmptyVocabulary,

    #[error("invalid hyperparameter: {0}")]
    InvalidHyper(String),

    #[error("training for a label requires at least one positive example")]
    NoPositives,

    #[error("LP solve failed: {0}")]
    Lp(String),

    #[error("{0}")]
    MasterState(&'static str),

    #[error("unknown label '{label}'; available: {available:?}")]
    UnknownLabel {
        label: String,
        available: Vec<String>,
    },

    #[error("model file error: {0}")]
    Model(String),

    #[error("training failed for {} label(s): {summary}", failures.len())]
    LabelFailures {
        failures: Vec<(String, String)>,
        summary: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

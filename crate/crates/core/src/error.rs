use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot read directory {path}: {reason}")]
    UnreadableDirectory { path: PathBuf, reason: String },

    #[error("malformed wav {path}: {reason}")]
    MalformedWav { path: PathBuf, reason: String },

    #[error("duplicate file stem `{stem}` ({first} and {second}); pairing is ambiguous")]
    DuplicateStem {
        stem: String,
        first: PathBuf,
        second: PathBuf,
    },

    #[error("zero-length audio: {0}")]
    EmptyAudio(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("subset sizes request {requested} entries but the corpus has {available}")]
    SubsetSizesExceedCorpus { requested: usize, available: usize },

    #[error("unknown id `{0}`")]
    UnknownId(String),

    #[error("output already exists: {0}")]
    OutputCollision(PathBuf),

    #[error("need at least 2 entries to plan generation, got {0}")]
    TooFewEntries(usize),

    #[error("id `{0}` contains the reserved separator `__from__`")]
    ReservedSeparator(String),

    #[error("cannot resolve transcript source for `{0}`")]
    UnresolvedSource(String),

    #[error("result `{0}` is not ok; only ok results can be filtered")]
    NotOk(String),

    #[error("validation count {val_count} must be smaller than the {available} available rows")]
    ValidationTooLarge { val_count: usize, available: usize },

    #[error("missing wav for `{id}`: {path}")]
    MissingWav { id: String, path: PathBuf },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("empty reference for: {}", .0.join(", "))]
    EmptyReference(Vec<String>),

    #[error("backend template is missing placeholder(s): {}", .0.join(", "))]
    MissingPlaceholders(Vec<String>),

    #[error("backend `{command}` exited with {status}")]
    BackendFailed { command: String, status: String },

    #[error("backend `{command}` timed out after {seconds}s")]
    BackendTimeout { command: String, seconds: u64 },

    #[error("backend output mismatch: {0}")]
    BackendOutput(String),

    #[error("backend reported model {0} but it does not exist")]
    MissingModelArtifact(PathBuf),

    #[error("train and dev manifests overlap on {0}")]
    OverlappingManifests(String),

    #[error("invalid rating category `{0}` (expected poor, reasonable or good)")]
    InvalidCategory(String),

    #[error("{dir} has {available} audios, {requested} requested")]
    InsufficientAudio {
        dir: PathBuf,
        available: usize,
        requested: usize,
    },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("conflict: {0}")]
    Conflict(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Attaches a path to `std::io` failures.
pub(crate) trait IoContext<T> {
    fn at(self, path: impl Into<PathBuf>) -> Result<T>;
}

impl<T> IoContext<T> for std::io::Result<T> {
    fn at(self, path: impl Into<PathBuf>) -> Result<T> {
        self.map_err(|e| Error::io(path, e))
    }
}

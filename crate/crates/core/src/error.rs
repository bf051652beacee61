use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate document id `{0}`")]
    DuplicateId(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown term `{0}`")]
    UnknownTerm(String),

    #[error("vocabulary target {target} unreachable: at most {achievable} terms are both frequent and bursting")]
    VocabularyUnreachable { target: usize, achievable: usize },

    #[error("no edges: similarity matrix has no positive entry")]
    NoEdges,

    #[error("empty graph")]
    EmptyGraph,

    #[error("year {year} outside palette range {min}-{max}")]
    YearOutOfRange { year: i32, min: i32, max: i32 },

    #[error("term `{0}` has zero total frequency")]
    ZeroFrequency(String),

    #[error("schema mismatch in {path}: expected {expected}, found {found}")]
    SchemaMismatch {
        path: PathBuf,
        expected: String,
        found: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Artifact { path: PathBuf, message: String },

    #[error("config: {0}")]
    Config(String),

    #[error("stage `{stage}` failed")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn artifact(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Artifact {
            path: path.into(),
            message: message.into(),
        }
    }
}

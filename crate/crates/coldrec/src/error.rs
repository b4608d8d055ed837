use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("duplicate rating for user `{user}`, item `{item}` with conflicting values {first} and {second}")]
    ConflictingRating {
        user: String,
        item: String,
        first: f64,
        second: f64,
    },

    #[error("split ratios {0:?} must be positive and sum to 1")]
    BadSplitRatios([f64; 3]),

    #[error("index {index} out of bounds for {what} of size {size}")]
    IndexOutOfBounds {
        what: &'static str,
        index: usize,
        size: usize,
    },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("requested density {requested} is infeasible: {reason}")]
    InfeasibleDensity { requested: f64, reason: String },

    #[error("frame matrix for item `{0}` is empty")]
    EmptyFrameMatrix(String),

    #[error("pca: requested {k} components but input has only {dim} dimensions")]
    PcaTooManyComponents { k: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("unknown genre label `{0}`")]
    UnknownGenre(String),

    #[error("fusion requires at least 2 inputs, got {0}")]
    TooFewFusionInputs(usize),

    #[error("fusion inputs are misaligned: {0}")]
    ItemMisalignment(String),

    #[error("positive rating on a zero-norm column; interaction matrix is inconsistent")]
    InconsistentNorm,

    #[error("item {0} is cold in this model; score it through predict_cold")]
    ColdItemInWarmPredict(usize),

    #[error("linear system is singular and no ridge term is present ({context})")]
    SingularSystem { context: &'static str },

    #[error("training objective became non-finite at sweep {sweep}")]
    NonFiniteObjective { sweep: usize },

    #[error("{0}")]
    UndefinedMetric(String),

    #[error("every tuning candidate failed to train")]
    AllCandidatesFailed,

    #[error("expected artifact missing at {path}: {what}")]
    MissingArtifact { what: String, path: PathBuf },

    #[error("malformed {what} at {path} line {line}: {reason}")]
    MalformedFile {
        what: &'static str,
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

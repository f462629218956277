use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("attribute {0} not found")]
    UnknownAttribute(String),

    #[error("attribute {attr}: expected {expected} attribute, found {found}")]
    KindMismatch {
        attr: String,
        expected: &'static str,
        found: &'static str,
    },

    #[error("row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("csv: {0}")]
    Csv(String),

    #[error("attribute {attr}: null value at row {row}")]
    NullValue { attr: String, row: usize },

    #[error("attribute {0} is entirely null and cannot be imputed")]
    AllNull(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid pattern: {0}")]
    Pattern(String),

    #[error("attribute {0} yields a single-branch split (zero split information)")]
    ZeroSplitInfo(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("graph contains a cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),

    #[error("invalid network: {0}")]
    Network(String),

    #[error("evidence has zero probability")]
    ZeroProbability,

    #[error("strategy: {0}")]
    Strategy(String),

    #[error("stage {stage} ({kind}): {source}")]
    Stage {
        stage: usize,
        kind: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

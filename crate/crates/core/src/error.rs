//! Shared error type for the pipeline.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by any pipeline stage.
///
/// The CLI maps these onto process exit codes: `Config`/`Precondition` → 1,
/// `Schema` → 2, `Provider` → 3, `Budget` → 4.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("schema violation in {path}{}: {message}", line.map(|l| format!(" line {l}")).unwrap_or_default())]
    Schema {
        path: PathBuf,
        line: Option<usize>,
        message: String,
    },

    #[error("provider error: {0}")]
    Provider(#[from] ProviderError),

    #[error("estimated provider cost ${estimate:.4} exceeds budget ceiling ${ceiling:.4}")]
    Budget { estimate: f64, ceiling: f64 },

    #[error("missing upstream stage output: {0}")]
    MissingInput(PathBuf),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Failures from chat/embedding providers.
#[derive(Debug, thiserror::Error)]
pub enum ProviderError {
    #[error("authentication failed: {0}")]
    Auth(String),

    #[error("rate limited after {retries} retries: {message}")]
    RateLimited { retries: u32, message: String },

    #[error("transient failure after {retries} retries: {message}")]
    Exhausted { retries: u32, message: String },

    #[error("malformed provider response: {message}; raw payload: {raw}")]
    MalformedResponse { message: String, raw: String },

    #[error("embedding dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty reply from provider")]
    EmptyReply,

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("agent reply unparseable after {retries} retries: {last_reply}")]
    Unparseable { retries: u32, last_reply: String },

    #[error("transport error: {0}")]
    Transport(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn schema(path: impl Into<PathBuf>, line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Exit code the CLI should use for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Precondition(_) | Error::Io { .. } => 1,
            Error::Schema { .. } | Error::MissingInput(_) => 2,
            Error::Provider(_) => 3,
            Error::Budget { .. } => 4,
        }
    }
}

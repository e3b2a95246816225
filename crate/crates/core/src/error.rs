use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by the CLI to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numerical,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed WARC record at byte offset {offset}: {reason}")]
    Warc { offset: u64, reason: String },

    #[error("row {index} rejected: {reason}")]
    RowRejected { index: usize, reason: String },

    #[error("malformed CSV at line {line}: {reason}")]
    CsvLine { line: u64, reason: String },

    #[error("store is empty")]
    EmptyStore,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("design matrix is rank deficient: column {column} is collinear with {with}")]
    RankDeficient { column: String, with: String },

    #[error("AR coefficients are not stationary (partial autocorrelation {pacf} at lag {lag})")]
    NonStationary { lag: usize, pacf: f64 },

    #[error("ill-conditioned system (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("optimizer did not converge after {iterations} iterations (gradient max-norm {gradient_norm:.3e})")]
    NotConverged {
        iterations: usize,
        gradient_norm: f64,
        best: Box<crate::its::GlsFit>,
    },

    #[error("training aborted: {0}")]
    Training(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Sqlite(#[from] rusqlite::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Input(_) | Error::Config(_) => ErrorKind::Usage,
            Error::Degenerate(_)
            | Error::RankDeficient { .. }
            | Error::NonStationary { .. }
            | Error::IllConditioned { .. }
            | Error::Numerical(_)
            | Error::NotConverged { .. }
            | Error::Training(_) => ErrorKind::Numerical,
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}

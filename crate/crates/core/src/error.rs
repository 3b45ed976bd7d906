use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("metric undefined: {0}")]
    UndefinedMetric(String),
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV error in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("JSON error in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl ClusterError {
    pub(crate) fn dim(context: &'static str, expected: usize, found: usize) -> Self {
        ClusterError::Dimension {
            context,
            expected,
            found,
        }
    }
}

pub type Result<T, E = ClusterError> = std::result::Result<T, E>;

use thiserror::Error;

/// Crate-wide error type.
///
/// `Data`, `Parse` and `Config` describe bad user input; the remaining
/// variants indicate a bug or an unusable numerical state.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {context}: {details}")]
    Shape { context: String, details: String },

    #[error("non-finite value produced by {context}")]
    NonFinite { context: String },

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn shape(context: impl Into<String>, details: impl Into<String>) -> Self {
        Error::Shape {
            context: context.into(),
            details: details.into(),
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the error stems from user-supplied input (files, configs,
    /// ids) rather than an internal failure. The CLI maps this to exit code 2.
    pub fn is_user_error(&self) -> bool {
        matches!(
            self,
            Error::Data(_) | Error::Parse { .. } | Error::Config(_) | Error::Io { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

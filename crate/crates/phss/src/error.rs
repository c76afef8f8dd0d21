use thiserror::Error;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] phss_core::Error),

    /// Malformed text input; `line` is 1-based.
    #[error("{source_name}:{line}: {message}")]
    Parse { source_name: String, line: usize, message: String },

    /// Bad coefficient expression; `column` is 1-based.
    #[error("expression `{input}`, column {column}: {message}")]
    Expression { input: String, column: usize, message: String },

    #[error("invalid experiment: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub(crate) fn parse(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Self::Parse { source_name: source_name.to_string(), line, message: message.into() }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Self::Io { path: path.as_ref().display().to_string(), source }
    }
}

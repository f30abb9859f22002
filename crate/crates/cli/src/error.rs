use std::path::{Path, PathBuf};

use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] momentnet::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Config { path: PathBuf, source: serde_json::Error },
    #[error("invalid value for {flag}: {msg}")]
    Usage { flag: String, msg: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn usage(flag: &str, msg: impl Into<String>) -> Self {
        CliError::Usage { flag: flag.to_string(), msg: msg.into() }
    }

    fn kind(&self) -> &'static str {
        use momentnet::Error as E;
        match self {
            CliError::Core(E::Config { .. }) | CliError::Config { .. } => "config",
            CliError::Core(E::Io(_)) | CliError::Io { .. } => "io",
            CliError::Core(E::Parse { .. } | E::BadMagic | E::Format(_) | E::Json(_)) | CliError::Json(_) => "format",
            CliError::Usage { .. } => "usage",
            CliError::Core(_) => "runtime",
        }
    }

    /// `{"error": {"kind", "message", "field"?}}` for stderr.
    pub fn to_json(&self) -> Value {
        let mut body = json!({ "kind": self.kind(), "message": self.to_string() });
        let field = match self {
            CliError::Core(momentnet::Error::Config { field, .. }) => Some(field.clone()),
            CliError::Usage { flag, .. } => Some(flag.clone()),
            _ => None,
        };
        if let Some(f) = field {
            body["field"] = Value::String(f);
        }
        json!({ "error": body })
    }
}

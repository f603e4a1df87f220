use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: malformed JSON: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    /// A well-formed file whose content fails validation. `pointer` is a
    /// JSON pointer into the file, empty when the whole file is at fault.
    #[error("{path}{}: {message}", at(pointer))]
    Invalid {
        path: String,
        pointer: String,
        message: String,
    },
    #[error("{0}")]
    Usage(String),
}

fn at(pointer: &str) -> String {
    if pointer.is_empty() {
        String::new()
    } else {
        format!(" at {pointer}")
    }
}

impl CliError {
    pub fn invalid(path: &str, pointer: &str, message: impl ToString) -> Self {
        CliError::Invalid {
            path: path.to_string(),
            pointer: pointer.to_string(),
            message: message.to_string(),
        }
    }

    pub fn file(&self) -> Option<&str> {
        match self {
            CliError::Io { path, .. } | CliError::Json { path, .. } | CliError::Invalid { path, .. } => Some(path),
            CliError::Usage(_) => None,
        }
    }

    pub fn pointer(&self) -> Option<&str> {
        match self {
            CliError::Invalid { pointer, .. } => Some(pointer),
            _ => None,
        }
    }
}

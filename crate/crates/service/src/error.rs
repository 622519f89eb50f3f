use std::path::PathBuf;

use gnomon_core::Diagnostic;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("journal {path} line {line}: {message}")]
    Journal {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("assertion rejected: {}", summary(.diagnostics))]
    Rejected { diagnostics: Vec<Diagnostic> },
    #[error("no document `{0}`")]
    NotFound(String),
}

impl ServiceError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> ServiceError {
        ServiceError::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine name used in API error bodies.
    pub fn rule(&self) -> &'static str {
        match self {
            ServiceError::Io { .. } => "io-error",
            ServiceError::Journal { .. } => "corrupt-journal",
            ServiceError::Rejected { .. } => "validation-failed",
            ServiceError::NotFound(_) => "not-found",
        }
    }
}

fn summary(diagnostics: &[Diagnostic]) -> String {
    let errors: Vec<_> = diagnostics
        .iter()
        .filter(|d| d.is_error())
        .map(|d| d.rule.as_str())
        .collect();
    errors.join(", ")
}

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by graph construction, the dynamical systems and file I/O.
#[derive(Debug, Error)]
pub enum LcuError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("self-loop on vertex {vertex}")]
    SelfLoop { vertex: usize },

    #[error(
        "graph is disconnected ({components} components); \
         increase k to the smallest value that yields a connected network"
    )]
    Disconnected { components: usize },

    #[error("no labeled vertex for class(es) {}", format_classes(.0))]
    MissingClasses(Vec<usize>),

    #[error("network generation failed: {0}")]
    GenerationFailed(String),

    #[error("correlation undefined: zero variance in {0}")]
    UndefinedCorrelation(&'static str),

    #[error("{}:{line}: {message}", .path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("I/O error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_classes(classes: &[usize]) -> String {
    classes
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl LcuError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LcuError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        LcuError::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = LcuError> = std::result::Result<T, E>;

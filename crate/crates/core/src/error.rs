use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the mesh, sparse, quadrature, assembly and solver layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("element {elem} has non-positive signed measure {measure:e}")]
    NonPositiveVolume { elem: usize, measure: f64 },

    #[error("element {elem} is degenerate (measure {measure:e})")]
    DegenerateElement { elem: usize, measure: f64 },

    #[error("invalid boundary flag value {0} (expected 0, 1, 2 or 3)")]
    InvalidFlagValue(i64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index set is not strictly increasing at position {0}")]
    UnsortedIndexSet(usize),

    #[error("unknown quadrature rule: {0}")]
    UnknownRule(String),

    #[error("matrix of order {n} exceeds the dense limit {limit}")]
    TooLargeForDense { n: usize, limit: usize },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("conjugate gradient stopped after {iterations} iterations with relative residual {relres:e}")]
    MaxIterExceeded {
        x: Vec<f64>,
        iterations: usize,
        relres: f64,
    },

    #[error("mesh has no Dirichlet boundary faces")]
    NoDirichletBoundary,

    #[error("boundary condition type {0} is not supported")]
    UnsupportedBoundaryType(u8),

    #[error("{}:{line}: {msg}", path.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "<input>".into()))]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        msg: String,
    },

    // Not marked as a source: the message already carries it, and error
    // chains would otherwise print it twice.
    #[error("I/O error: {0}")]
    Io(std::io::Error),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: None,
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn with_path(self, path: &std::path::Path) -> Self {
        match self {
            Error::Parse { line, msg, .. } => Error::Parse {
                path: Some(path.to_path_buf()),
                line,
                msg,
            },
            other => other,
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown residue code {0:?}")]
    UnknownResidue(String),

    #[error("no C-alpha atoms found")]
    NoCAlpha,

    #[error("lattice is empty after filtering")]
    EmptyLattice,

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("problem has {vars} variables, exact solver limit is {limit}")]
    TooManyVariables { vars: usize, limit: usize },

    #[error("contact estimate did not converge after {iterations} iterations (trace: {trace:?})")]
    NotConverged { iterations: usize, trace: Vec<f64> },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("no feasible solution: {0}")]
    Infeasible(String),

    #[error("corrupt archive: {0}")]
    CorruptArchive(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub(crate) fn read_to_string(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_string(path: &std::path::Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the library and mapped to process exit codes by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input: inadmissible exponent, bad geometry, malformed config.
    #[error("configuration error: {0}")]
    Config(String),

    /// An iterative solver did not reach its tolerance.
    #[error("solver error: {message} (final relative residual {residual:.3e} after {iterations} iterations)")]
    Solver {
        message: String,
        residual: f64,
        iterations: usize,
    },

    /// A factorization broke down (matrix not SPD, singular system).
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Prefixes the message with the stage that failed, keeping the variant.
    pub fn context(self, ctx: impl std::fmt::Display) -> Self {
        match self {
            Error::Config(m) => Error::Config(format!("{ctx}: {m}")),
            Error::Solver {
                message,
                residual,
                iterations,
            } => Error::Solver {
                message: format!("{ctx}: {message}"),
                residual,
                iterations,
            },
            Error::Numerical(m) => Error::Numerical(format!("{ctx}: {m}")),
            other => other,
        }
    }

    /// Process exit code: 2 for configuration problems, 3 for solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse { .. } => 2,
            Error::Solver { .. } | Error::Numerical(_) => 3,
            Error::Io { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

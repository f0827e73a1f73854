use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("sample length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("spectrum is not Hermitian: mode {mode} deviates by {deviation:e}")]
    NonHermitian { mode: i64, deviation: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integration blew up at t = {time}")]
    BlowUp { time: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("singular Jacobian (smallest singular value {sigma_min:e})")]
    SingularJacobian { sigma_min: f64 },

    #[error("no steep feature found: {0}")]
    FeatureAbsent(String),

    #[error("quantity undefined for model family {0}")]
    UndefinedFamily(String),

    #[error("config error{}: {msg}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config { line: Option<usize>, msg: String },

    #[error("format error in {path}: {msg}")]
    Format { path: PathBuf, msg: String },

    #[error("analysis failed: {0}")]
    Analysis(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(line: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Config {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidArgument(_) | Error::InvalidGrid(_) => 2,
            Error::Io { .. } | Error::Format { .. } => 4,
            _ => 3,
        }
    }
}

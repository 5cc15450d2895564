use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("truncation for mode {mode} must keep at least 2 levels, got {levels}")]
    Truncation { mode: &'static str, levels: usize },

    #[error("unknown mode label {0:?} (expected a, b or c)")]
    UnknownMode(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("steady state is not unique: {0}")]
    DegenerateSteadyState(String),

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("time evolution reached t = {t_max} before |drho/dt| < {tol:e} (last {last:e})")]
    HorizonExceeded { t_max: f64, tol: f64, last: f64 },

    #[error("{quantity} needs at least {required} Fock levels, truncation has {levels}")]
    TruncationTooSmall {
        quantity: &'static str,
        required: usize,
        levels: usize,
    },

    #[error("config error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("unknown preset {0:?}")]
    UnknownPreset(String),

    #[error("plot error: {0}")]
    Plot(String),

    #[error("every grid point failed ({0} points)")]
    AllPointsFailed(usize),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DgError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("solution blew up at t = {time}")]
    Blowup { time: f64 },

    #[error("no convergence after {iterations} iterations (last update {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("at least two mesh levels are needed, got {0}")]
    InsufficientLevels(usize),

    #[error("unsupported polynomial degree {0}")]
    Unsupported(usize),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for DgError {
    fn from(e: std::io::Error) -> Self {
        DgError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, DgError>;

use thiserror::Error;

/// Errors raised by the numerical kernels and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-convergence: {0}")]
    NonConvergence(String),

    #[error("ellipticity violated at node {node}: a = {value} < mu = {mu}")]
    Ellipticity { node: usize, value: f64, mu: f64 },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("basis size: {0}")]
    BasisSize(String),

    #[error("compatibility violated: boundary datum at t = 0 is {value} (must vanish)")]
    Compatibility { value: f64 },

    #[error("spectral truncation: last retained mode carries {fraction:e} of the energy")]
    Truncation { fraction: f64 },

    #[error("divergent weighted integral: singular cells carry {ratio:.3} of the remaining mass")]
    Divergent { ratio: f64 },

    #[error("ill-conditioned Gram matrix (condition estimate {0:e})")]
    IllConditioned(f64),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

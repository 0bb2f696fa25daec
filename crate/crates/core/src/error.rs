use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A model parameter violates one of its constraints.
    #[error("{0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The eigenvalue problem does not have the expected ± paired structure.
    #[error("malformed Bogoliubov matrix: {0}")]
    MalformedMatrix(String),

    #[error("divergent fluctuation at critical point")]
    CriticalPoint,

    /// A squeeze parameter of the analytic decomposition diverges.
    #[error("divergent squeeze parameter: {0}")]
    Divergent(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("Hilbert-space dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("Lanczos did not converge after {restarts} restarts (residual {residual:e})")]
    NotConverged { restarts: usize, residual: f64 },

    #[error("photon cutoff too small: top Fock layers hold population {0:e}")]
    CutoffInadequate(f64),

    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

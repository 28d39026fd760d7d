use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("refinement level {level} exceeds the maximum of {max}")]
    Capacity { level: usize, max: usize },

    #[error("point ({x}, {y}) is not contained in any cell")]
    PointNotFound { x: f64, y: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate cell {cell} with area {area:e}")]
    DegenerateCell { cell: usize, area: f64 },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("linear solver did not converge: {0}")]
    LinearSolver(String),

    #[error("no convergence after {iterations} iterations (last residual {:e})", history.last().copied().unwrap_or(f64::NAN))]
    Divergence { iterations: usize, history: Vec<f64> },

    #[error("solution was computed with the {found} variant, expected {expected}")]
    WrongVariant { expected: &'static str, found: &'static str },

    #[error("level {level}: {source}")]
    Level {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// The underlying error with level context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Level { source, .. } => source.root(),
            other => other,
        }
    }
}

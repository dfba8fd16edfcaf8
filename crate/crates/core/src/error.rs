use thiserror::Error;

/// Errors produced by graph construction and the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("graph is not connected (no globally reachable node)")]
    Disconnected,

    #[error("singular Sylvester operator: denominator {denominator:e} at block ({row}, {col})")]
    SingularSylvester {
        denominator: f64,
        row: usize,
        col: usize,
    },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("{0} did not converge")]
    Convergence(&'static str),

    #[error("matrix is not skew-symmetric (residual {0:e})")]
    NotSkew(f64),

    #[error("matrix is not symmetric (residual {0:e})")]
    Asymmetric(f64),

    #[error("unstable step size: dt * max Re(lambda) = {0}")]
    UnstableStep(f64),
}

impl Error {
    /// True for errors caused by malformed or out-of-contract input, as
    /// opposed to failures inside a numerical kernel.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::InvalidGraph(_)
                | Error::InvalidArgument(_)
                | Error::DimensionMismatch { .. }
                | Error::NotSkew(_)
                | Error::Asymmetric(_)
                | Error::UnstableStep(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

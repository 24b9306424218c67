use thiserror::Error;

/// Errors raised by constructions and checks in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("ellipticity condition fails: minimum eigenvalue of A_F is {min_eigenvalue:e}")]
    Ellipticity { min_eigenvalue: f64 },

    #[error("numerical failure: {detail}")]
    NumericalFailure {
        detail: String,
        /// Best iterate reached before giving up, if the solver has one.
        best: Option<Vec<f64>>,
    },

    #[error("degenerate chart at node {node}: {detail}")]
    Discretization { node: usize, detail: String },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("hypothesis violated: {detail}")]
    HypothesisViolation { detail: String, nodes: Vec<usize> },

    #[error("orientation error: {0}")]
    Orientation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::NumericalFailure {
            detail: msg.into(),
            best: None,
        }
    }
}

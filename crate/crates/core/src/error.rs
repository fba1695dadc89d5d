use thiserror::Error;

/// Error taxonomy shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Reserves or an argument fall outside the family's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A monotone root-finder could not straddle its target.
    ///
    /// `limit` carries the furthest feasible abscissa when the search was
    /// stopped by a domain boundary.
    #[error("bracket error: {reason}")]
    Bracket { reason: String, limit: Option<f64> },

    /// Iteration budget exhausted with the residual above tolerance.
    #[error("tolerance error: residual {residual:e} after {iterations} iterations")]
    Tolerance { residual: f64, iterations: usize },

    /// Malformed market descriptor or parameters.
    #[error("spec error: {0}")]
    Spec(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn spec(msg: impl Into<String>) -> Self {
        Error::Spec(msg.into())
    }

    pub fn bracket(reason: impl Into<String>) -> Self {
        Error::Bracket {
            reason: reason.into(),
            limit: None,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Spec(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

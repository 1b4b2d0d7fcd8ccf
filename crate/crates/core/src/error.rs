use thiserror::Error;

/// Errors raised by region computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Enumeration would exceed the supported size.
    #[error("resource limit: {0}")]
    Resource(String),
    /// The distortion triple is not reachable by the correlated-noise construction.
    #[error("infeasible distortions: {0}")]
    Infeasible(String),
    /// The construction requires `D1 <= D3` and got the reverse.
    #[error("role order: D1 = {d1} exceeds D3 = {d3}; swap descriptions 1 and 3")]
    RoleOrder { d1: f64, d3: f64 },
    /// A covariance matrix was singular or not positive definite.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Malformed input document.
    #[error("parse error: {0}")]
    Parse(String),
    /// Two independent evaluations of the same quantity disagree.
    #[error("validation failure: {0}")]
    Validation(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Domain(_) => "domain",
            Self::Resource(_) => "resource",
            Self::Infeasible(_) => "infeasible",
            Self::RoleOrder { .. } => "role_order",
            Self::Numeric(_) => "numeric",
            Self::Parse(_) => "parse",
            Self::Validation(_) => "validation",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

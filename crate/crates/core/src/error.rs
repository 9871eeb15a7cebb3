use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested function.
    #[error("{op}: domain error: {reason}")]
    Domain { op: &'static str, reason: String },

    /// Adaptive quadrature ran out of regions before meeting its tolerance.
    #[error(
        "quadrature did not converge after {regions} regions: best estimate {best}, error {error}"
    )]
    Convergence {
        best: String,
        error: String,
        regions: usize,
    },

    /// Newton iteration for quadrature nodes failed.
    #[error("node construction failed for {rule}: {reason}")]
    NodeConvergence { rule: String, reason: String },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// The evaluation point lies on the interfocal segment, where the
    /// Neumann expansion diverges.
    #[error("singular geometry: {0}")]
    SingularGeometry(String),

    #[error("unsupported orientation: {0}")]
    UnsupportedOrientation(String),

    #[error("invalid orbital: {0}")]
    InvalidOrbital(String),

    #[error("cannot parse decimal {0:?}")]
    Parse(String),

    #[error("invalid precision: {0}")]
    Precision(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            op,
            reason: reason.into(),
        }
    }
}

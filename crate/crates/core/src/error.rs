use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ensemble spec: {0}")]
    InvalidSpec(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("d-regular generation failed after {attempts} attempts (n={n}, d={d})")]
    DRegularGenerationFailure { n: usize, d: usize, attempts: usize },

    #[error("correlation rho must lie in [0, 1], got {0}")]
    InvalidRho(f64),

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("imaginary part lost positivity in {0}")]
    ImViolation(&'static str),

    #[error("eta too large for the five-piece decomposition at E={energy}: {reason}")]
    EtaTooLarge { energy: f64, reason: String },

    #[error("minor H^(j) - z is numerically singular")]
    SingularMinor,

    #[error("log-potential diverges at E={0}")]
    DivergentIntegral(f64),

    #[error("good set is empty on the probed domain")]
    EmptyGoodSet,

    #[error("objective does not decay within probe radius {0}")]
    UnboundedDomainNoDecay(f64),

    #[error("u-grid misses the maximizer: largest integrand at the grid boundary")]
    GridMissesMaximizer,

    #[error("matrix is singular")]
    Singular,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    /// Stable snake_case name of the variant, for machine-readable records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpec(_) => "invalid_spec",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::DRegularGenerationFailure { .. } => "d_regular_generation_failure",
            Error::InvalidRho(_) => "invalid_rho",
            Error::NoConvergence { .. } => "no_convergence",
            Error::ImViolation(_) => "im_violation",
            Error::EtaTooLarge { .. } => "eta_too_large",
            Error::SingularMinor => "singular_minor",
            Error::DivergentIntegral(_) => "divergent_integral",
            Error::EmptyGoodSet => "empty_good_set",
            Error::UnboundedDomainNoDecay(_) => "unbounded_domain_no_decay",
            Error::GridMissesMaximizer => "grid_misses_maximizer",
            Error::Singular => "singular",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
            Error::Config(_) => "config",
        }
    }

    pub(crate) fn spec(msg: impl Into<String>) -> Self {
        Error::InvalidSpec(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

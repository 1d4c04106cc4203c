use thiserror::Error;

/// Errors raised by the solvers, parsers and duality checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("missing parameter `{0}`")]
    MissingParameter(String),

    #[error("length mismatch: expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("no sign change found while bracketing {0}")]
    NoBracket(String),

    #[error("{what} is not monotonic on the scanned interval")]
    NonMonotone { what: String },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("{what} not converged: {coarse} vs {fine}")]
    ConvergenceFailure { what: String, coarse: f64, fine: f64 },

    #[error("ill-conditioned symmetrized basis in band {band}: {detail}")]
    IllConditioned { band: usize, detail: String },

    #[error("power-law exponents differ: {0} vs {1}")]
    ExponentMismatch(f64, f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{side} side: {source}")]
    Side {
        side: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn on_side(self, side: &'static str) -> Self {
        Error::Side {
            side,
            source: Box::new(self),
        }
    }

    /// True when the failure comes from a numerical solver rather than bad input.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::NoBracket(_)
            | Error::NonMonotone { .. }
            | Error::NonConvergence { .. }
            | Error::ConvergenceFailure { .. }
            | Error::IllConditioned { .. } => true,
            Error::Side { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use crate::dagum::DagumParams;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{what} is out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    /// A structural precondition on the input was violated.
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),

    /// The pivot equation has no root for this risk level: the confidence
    /// set is unbounded on that side.
    #[error("no interval endpoint exists at gamma = {gamma}")]
    NoEndpoint { gamma: f64 },

    /// No branch of W produced an acceptable root of the pivot equation.
    #[error("closed-form endpoint failed at gamma = {gamma}")]
    ClosedForm { gamma: f64 },

    #[error("root not bracketed in [{lo}, {hi}]")]
    Bracketing { lo: f64, hi: f64 },

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("length minimization failed: {0}")]
    Optimizer(&'static str),

    /// Likelihood maximization stopped without converging.
    #[error("maximum likelihood fit failed after {iterations} iterations: {reason}")]
    FitFailed { reason: &'static str, iterations: usize, best: Option<DagumParams> },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }

    /// True for errors caused by bad arguments rather than by a numerical
    /// procedure failing on valid arguments.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Domain { .. } | Error::InvalidInput(_))
    }
}

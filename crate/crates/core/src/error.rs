use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative method failed to converge; `last_estimate` is the best
    /// value it reached.
    #[error("numerical failure: {what} (last estimate {last_estimate})")]
    Numerical { what: String, last_estimate: f64 },
    /// The shooting endpoint missed the boundary condition by `residual`.
    #[error("shooting mismatch: |u(1)| = {residual:e} exceeds {tolerance:e}")]
    ShootingMismatch { residual: f64, tolerance: f64 },
    /// A computed object violates a structural property it must have.
    #[error("structural error: {0}")]
    Structural(String),
    /// A state field went non-finite during time stepping.
    #[error("blow-up at t = {time}")]
    BlowUp { time: f64 },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(what: impl Into<String>, last_estimate: f64) -> Self {
        Error::Numerical {
            what: what.into(),
            last_estimate,
        }
    }
}

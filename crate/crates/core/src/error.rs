use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Two evaluation routes disagreed beyond their fixed tolerance. This
    /// points at a bug rather than at bad input.
    #[error("internal consistency check failed in {what}: residual {residual:e} exceeds {tolerance:e}")]
    Inconsistency {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    /// The threshold scan never saw the family criterion turn from positive to
    /// non-positive.
    #[error("no downward sign change of the family criterion in (0, {upper}]")]
    NoSignChange { upper: f64 },

    /// A profile handed to the stability experiment is not close enough to a
    /// bound state.
    #[error("ground-state gate failed: residual {residual:e} is not below {gate:e}")]
    ResidualGate { residual: f64, gate: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

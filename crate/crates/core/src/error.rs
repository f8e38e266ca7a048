use thiserror::Error;

/// Failures raised by the solvers and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate state: |v| = {v:e} is below the floor {floor:e}")]
    DegenerateState { v: f64, floor: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("state is not on the {curve} curve (residual {residual:e})")]
    NotOnCurve { curve: &'static str, residual: f64 },
    #[error("no intermediate state: {0}")]
    NoIntermediate(String),
    #[error("singular shock speed undefined for v_L = v_R")]
    EqualV,
    #[error("trajectory left the bounding box at eta = {eta}")]
    BlowUp { eta: f64 },
    #[error("tail covers {decades:.2} decades, at least {required} needed")]
    InsufficientTail { decades: f64, required: f64 },
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("deficit integral did not converge: {0}")]
    NonConvergent(String),
    #[error("vanishing denominator {factor} in the chart-2 vector field")]
    SingularDenominator { factor: &'static str },
    #[error("time step collapsed to {dt:e} at t = {t}")]
    CflCollapse { t: f64, dt: f64 },
    #[error("no front crossing level {level}")]
    NoFront { level: f64 },
    #[error("measurement window left the domain at t = {t}")]
    WindowEscape { t: f64 },
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Errors that indicate a bug or numerical breakdown rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::NoIntermediate(_) | Error::Consistency(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

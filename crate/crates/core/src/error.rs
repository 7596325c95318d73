use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model or function parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("invalid interval: lower end {lo} exceeds upper end {hi}")]
    InvalidInterval { lo: f64, hi: f64 },
    /// The integral defining a constant diverges (tail exponent at most 1).
    #[error("domain error: alpha = {alpha} must exceed 1")]
    Domain { alpha: f64 },
    /// The requested accuracy cannot be certified within the truncation cap.
    #[error("no finite truncation meets tolerance {eps:e} (best certified error {achieved:e})")]
    NoFiniteTruncation { eps: f64, achieved: f64 },
    #[error("time {t} lies outside the path window [{lo}, {hi}]")]
    OutOfWindow { t: f64, lo: f64, hi: f64 },
    #[error("invalid utilization rho = {0}")]
    InvalidRho(f64),
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("quantity z = {0} is below 3; z log z normalization undefined")]
    SlopeDomain(f64),
    #[error("not enough service draws: need {needed}, got {got}")]
    ShortServiceSequence { needed: usize, got: usize },
    #[error("quadrature failed to reach tolerance {tol:e} (estimate {estimate}, error {error:e})")]
    Quadrature { tol: f64, estimate: f64, error: f64 },
}

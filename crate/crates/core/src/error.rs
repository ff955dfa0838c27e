use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("step underflow at t = {t}: dt = {dt:e} below dt_min = {dt_min:e}")]
    StepUnderflow { t: f64, dt: f64, dt_min: f64 },

    /// A non-finite value was produced; `dump` summarises the offending state.
    #[error("integrator fault at t = {t}: {dump}")]
    IntegratorFault { t: f64, dump: String },

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("bracketing error: alpha = {lo} and alpha = {hi} both classify as {class}")]
    Bracketing { lo: f64, hi: f64, class: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

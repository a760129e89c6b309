use thiserror::Error;

/// Errors raised by model construction, scale-function evaluation, verification and simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("model has monotone paths: {0}")]
    MonotonePaths(String),

    #[error("argument must be nonnegative, got {0}")]
    NegativeArgument(f64),

    #[error("argument must be strictly positive, got {0}")]
    NonPositiveArgument(f64),

    #[error("family `{0}` has no rational Laplace exponent; use numeric inversion")]
    NonRational(String),

    #[error("confluent roots unsupported (relative separation {separation:.3e})")]
    ConfluentRoots { separation: f64 },

    #[error("Laplace inversion did not converge (residual {residual:.3e}, tolerance {tolerance:.3e})")]
    InversionFailed { residual: f64, tolerance: f64 },

    #[error("quadrature did not converge (estimated error {residual:.3e}, requested {requested:.3e})")]
    QuadratureFailed { residual: f64, requested: f64 },

    #[error("x = {x} lies beyond the tabulated domain [0, {x_max}]")]
    OutOfDomain { x: f64, x_max: f64 },

    #[error("derivative order {0} not supported (0..=3)")]
    InvalidOrder(usize),

    #[error("Monte Carlo simulation requires a finite-activity jump measure")]
    NotFiniteActivity,

    #[error("time step {dt} too large: must be below 1/(10 λ) = {limit}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("model file: {0}")]
    ModelFile(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        reason: reason.into(),
    }
}

use thiserror::Error;

/// Errors produced by the locomotion model, the controllers and the harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("closest point is undefined: query point coincides with the circle center")]
    DegenerateQuery,
    #[error("curvature estimate needs three distinct points")]
    DegeneratePoints,
    #[error("sine-law argument {0} lies outside [-1, 1]")]
    InfeasibleGeometry(f64),
    #[error("step q = {q} is not smaller than 2*lambda = {two_lambda}")]
    StepTooLarge { q: f64, two_lambda: f64 },
    #[error("steering equation has no solution (sin theta = {0})")]
    NoSolution(f64),
    #[error("spring is never compressed for this touchdown state")]
    NoCompression,
    #[error("quadrature did not reach tolerance (estimated error {0:e})")]
    QuadratureFailure(f64),
    #[error("stance integration diverged at t = {0} s")]
    IntegrationDiverged(f64),
    #[error("stance integration exceeded {0} steps")]
    MaxStepExceeded(usize),
    #[error(
        "chord {q_target} m is unattainable at alpha = {alpha} rad for any positive stiffness"
    )]
    Unachievable { alpha: f64, q_target: f64 },
    #[error("no leg angle inside [{alpha_min}, {alpha_max}] realizes theta = {theta}")]
    NoConstrainedSolution {
        theta: f64,
        alpha_min: f64,
        alpha_max: f64,
    },
    #[error("cone is empty: gamma = {gamma} exceeds the alpha range {range}")]
    ConeEmpty { gamma: f64, range: f64 },
    #[error("time {t} s is outside the stance window [0, {duration}] s")]
    OutOfWindow { t: f64, duration: f64 },
    #[error("no leg plan could be produced at stance {0}")]
    PlanFailure(usize),
    #[error("invariant violated at stance {stance}: {what}")]
    InvariantViolation { stance: usize, what: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("usage error: {0}")]
    Usage(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

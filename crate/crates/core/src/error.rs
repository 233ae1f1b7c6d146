use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular minor: {0} vanishes")]
    SingularMinor(String),
    #[error("resonant denominator: {0} vanishes")]
    ResonantDenominator(String),
    #[error("sphere {0} has zero radius")]
    ZeroRadius(usize),
    #[error("negative discriminant while reconstructing normalized coordinates at sphere {0}")]
    NegativeDiscriminant(usize),
    #[error("NBC basis has {found} elements, dimension formula gives {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("two chamber endpoints coincide near x = {0}")]
    DegenerateRoots(f64),
    #[error("integral diverges at endpoint {endpoint} (sphere {sphere}): exponent {exponent} <= -1")]
    ConvergenceViolation { sphere: usize, endpoint: f64, exponent: f64 },
    #[error("quadrature reached error estimate {estimate:e}, target {target:e}")]
    ToleranceNotMet { estimate: f64, target: f64 },
    #[error("finite-difference extrapolation residual {0:e} exceeds tolerance")]
    StepTooLarge(f64),
    #[error("identity check failed: {0}")]
    IdentityFailed(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

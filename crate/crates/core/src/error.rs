use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("metric tensor g is singular")]
    SingularMetric,
    #[error("division by zero")]
    DivisionByZero,
    #[error("structure failed validation: {0}")]
    Validation(String),
    #[error("degree {degree} exceeds cutoff {cutoff}")]
    CutoffExceeded { degree: usize, cutoff: usize },
    #[error("size {size} exceeds limit {limit}")]
    SizeExceeded { size: usize, limit: usize },
    #[error("relations are inconsistent: the ideal contains a nonzero constant")]
    InconsistentRelations,
    #[error("star is not well defined: {0}")]
    StarUndefined(String),
    #[error("calculus is not well defined: {0}")]
    NotWellDefined(String),
    #[error("operation requires R = flip")]
    NotRTau,
    #[error("operation requires Z = 0")]
    ZNonzero,
    #[error("metric is not real symmetric")]
    NonSymmetricMetric,
    #[error("metric is not congruent to a ±1 diagonal over Q(i): {0}")]
    NotSquareCongruent(String),
    #[error("gamma matrices are invalid: {0}")]
    GammaMismatch(String),
    #[error("mass squared is not real: {re} + {im}i")]
    NonrealMass { re: f64, im: f64 },
    #[error("momentum is on shell: |m^2 - M^2| = {gap:e}")]
    OnShellPole { gap: f64 },
    #[error("braid operator is invalid: {0}")]
    BraidInvalid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

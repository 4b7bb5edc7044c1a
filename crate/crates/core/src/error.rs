use alloc::string::String;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("radius schedule needs at least 2 steps, got {0}")]
    ScheduleTooShort(usize),
    #[error("invalid radius schedule: {0}")]
    InvalidSchedule(&'static str),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("band evaluation at radius {radius} returned a non-value")]
    BandNotAValue { radius: f64 },
    #[error("invalid metric space: {0}")]
    InvalidMetric(String),
    #[error("invalid space: {0}")]
    InvalidSpace(&'static str),
    #[error("rho must be positive, got {0}")]
    InvalidRho(f64),
    #[error("the duality mapping is not defined at the zero vector")]
    ZeroVector,
    #[error("points belong to different spaces")]
    MismatchedSpaces,
    #[error("f must vanish at the base point, got f(base) = {0}")]
    BaseNotZero(f64),
    #[error("f must be finite at the probe point")]
    InfiniteValue,
    #[error("point index {0} out of range")]
    PointOutOfRange(usize),
    #[error("no subdifferential oracle: {0}")]
    NotEvaluable(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("implication {name} violated: {detail}")]
    ImplicationViolated { name: String, detail: String },
}

pub type Result<T> = core::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operation not supported for this scene: {0}")]
    UnsupportedScene(String),

    #[error("ray never meets a wall")]
    NoCollision,

    #[error("tangential hit: |incoming . n| = {0:e} is below the tangency tolerance")]
    TangentialHit(f64),

    #[error("time {t} outside [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("event is not an obstacle bounce")]
    NotObstacleBounce,

    #[error("trajectory touches the outer wall before bounce {0}")]
    TouchesOuterWall(usize),

    #[error("trajectory has only {have} obstacle bounces, {need} requested")]
    TooFewBounces { have: usize, need: usize },

    #[error("inadmissible itinerary: {0}")]
    Inadmissible(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("stability bound violated: {0}")]
    StabilityViolation(String),

    #[error("horizon {horizon} too short: the first two steps need {needed}")]
    HorizonTooShort { horizon: f64, needed: f64 },

    #[error("planning failure at t = {t}: {reason}")]
    PlanningFailure { t: f64, reason: String },

    #[error("realization failure: {0}")]
    RealizationFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

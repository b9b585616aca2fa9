use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("input not normalized: sum of squares = {0}")]
    Unnormalized(f64),

    #[error("time {t} outside [0, {duration}]")]
    TimeOutOfRange { t: f64, duration: f64 },

    #[error("decay value {0} outside (0, 1]")]
    DecayOutOfRange(f64),

    #[error("invalid envelope: {0}")]
    InvalidEnvelope(String),

    #[error("envelope not normalized to a π pulse: area = {0}")]
    EnvelopeNotNormalized(f64),

    #[error("invalid noise process: {0}")]
    InvalidProcess(String),

    #[error("white noise has no pointwise {0}; use integral statistics")]
    WhiteNoisePointwise(&'static str),

    #[error("negative duration {0}")]
    NegativeDuration(f64),

    #[error("invalid time step {dt} for duration {duration}")]
    InvalidStep { dt: f64, duration: f64 },

    #[error("empty time grid")]
    EmptyGrid,

    #[error("time grid point {0} outside the pulse window")]
    GridOutOfRange(f64),

    #[error("noise targets {found}, expected {expected}")]
    TargetMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("trajectory count must be at least 1")]
    NoTrajectories,
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: {what} has {left} samples but {other} has {right}")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        other: &'static str,
        right: usize,
    },

    #[error("time step mismatch: {left} h vs {right} h")]
    StepMismatch { left: f64, right: f64 },

    #[error("non-finite value at sample {index}")]
    NonFinite { index: usize },

    #[error("power {value} kW at sample {index} is outside [0, {p_rated}] kW")]
    PowerOutOfRange {
        index: usize,
        value: f64,
        p_rated: f64,
    },

    #[error("non-binary on/off value {value} at sample {index}")]
    NonBinary { index: usize, value: f64 },

    #[error("QoS bounds constrain `{0}` but the signal does not carry that channel")]
    MissingChannel(&'static str),

    #[error("empty envelope at {} sample(s), first at {}", .samples.len(), .samples[0])]
    EmptyEnvelope { samples: Vec<usize> },

    #[error("disturbances must be constant for this analysis (sample {index} differs)")]
    TimeVarying { index: usize },

    #[error("flexibility set is empty: {0}")]
    Infeasible(String),

    #[error("solver stopped without an optimum: {0}")]
    Solver(String),

    #[error("reference value {value} at slot {slot} is not an integer multiple of u")]
    NonIntegerReference { slot: usize, value: f64 },

    #[error("reference does not sum to zero (sum = {sum}); every pulse pair is zero-sum")]
    NonZeroSum { sum: i64 },

    #[error("search cap of {cap} loads exceeded (need {needed})")]
    LoadCapExceeded { cap: usize, needed: usize },

    #[error("trajectory covers {have} h but the window ends at {need} h")]
    WindowTooShort { have: f64, need: f64 },

    #[error("malformed schedule: {0}")]
    MalformedSchedule(String),

    #[error("{0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

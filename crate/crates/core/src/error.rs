use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported photon count {0}: only two-photon states are modelled")]
    UnsupportedPhotonCount(usize),

    #[error("unsupported mode count {0}: expected between 1 and 8 modes")]
    UnsupportedModeCount(usize),

    #[error("coupler is not lossless: r^2 + t^2 = {0}")]
    NonUnitaryCoupler(f64),

    #[error("a coupler needs two distinct modes")]
    CouplerSameMode,

    #[error("`{field}` = {value} is out of range: {expected}")]
    OutOfRange {
        field: String,
        value: f64,
        expected: String,
    },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("post-selection kept no coincidence events")]
    NoCoincidence,

    #[error("parameter `{knob}` does not exist on the {variant} model")]
    KnobMismatch { knob: String, variant: String },

    #[error("unknown parameter `{0}`")]
    UnknownKnob(String),

    #[error("empty search interval for `{0}`")]
    EmptyInterval(String),

    #[error("detector efficiency `{0}` is zero, rescaling is undefined")]
    ZeroEfficiency(&'static str),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks `lo <= value <= hi`; also rejects NaN.
pub(crate) fn check_range(field: &str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(Error::OutOfRange {
            field: field.to_string(),
            value,
            expected: format!("[{lo}, {hi}]"),
        })
    }
}

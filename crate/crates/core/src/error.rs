use thiserror::Error;

/// Errors produced by curve construction, accounting, bounds and calibration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric parameter lies outside its admissible domain.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A list-valued input that must be non-empty was empty.
    #[error("`{0}` must not be empty")]
    Empty(&'static str),

    /// Knots or masses that violate a structural invariant.
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid distribution pair: {0}")]
    InvalidPair(String),

    /// The worst-case baseline has no scalar value.
    #[error("worst-case baseline has no scalar value")]
    NoScalarBaseline,

    /// The requested bound is not defined for this mechanism description.
    #[error("method `{method}` is not available for {family}")]
    Unsupported { method: String, family: String },

    #[error("oracle instance too large: {outcomes} outcomes x {candidates} candidates exceeds {limit}")]
    InstanceTooLarge {
        outcomes: usize,
        candidates: usize,
        limit: usize,
    },

    /// No noise scale inside the (expanded) bracket meets the target.
    #[error("infeasible target {target}: lowest attainable risk is {floor}")]
    Infeasible { target: f64, floor: f64 },

    /// The risk was found to be non-monotone in the noise scale.
    #[error("risk is not monotone in noise scale: risk({lo}) = {risk_lo} < risk({hi}) = {risk_hi}")]
    NonMonotone {
        lo: f64,
        hi: f64,
        risk_lo: f64,
        risk_hi: f64,
    },

    /// Malformed configuration or CSV input.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "must be non-negative",
        })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && !value.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "must be positive",
        })
    }
}

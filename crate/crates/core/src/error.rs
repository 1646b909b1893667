use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coefficient q_{index} is outside the defined range 1..={len}")]
    CoefficientOutOfRange { index: usize, len: usize },

    #[error("noise sequence is empty")]
    EmptyNoise,

    #[error("enumeration needs {required} outcomes but the budget is {budget}")]
    EnumerationTooLarge { required: f64, budget: u64 },

    #[error("innovation law {0} does not have finite support")]
    InfiniteSupport(String),

    #[error("E|theta|^{order} is infinite for {spec}")]
    InfiniteMoment { spec: String, order: f64 },

    #[error("{0} requires a symmetric innovation law")]
    NotSymmetric(&'static str),

    #[error("E theta = {mean} but r = {r} >= 1 requires a mean-zero innovation law")]
    NonZeroMean { mean: f64, r: f64 },

    #[error("{0} replications requested, at least 100 are required")]
    TooFewReplications(u64),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("quadrature did not reach tolerance {tolerance:e} (estimate {estimate:e})")]
    Quadrature { tolerance: f64, estimate: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

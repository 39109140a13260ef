use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation.
    #[error("{op}: domain error: {detail}")]
    Domain { op: &'static str, detail: String },

    /// The requested moment is infinite for the given shape.
    #[error("moment of order {order} does not exist for xi = {xi} (requires xi < 1/{order})")]
    MomentUndefined { order: u32, xi: f64 },

    /// A prior was combined with parameters or a model it does not belong to.
    #[error("usage error: {0}")]
    Usage(String),

    /// Input data violates the sample invariants.
    #[error("invalid data: {0}")]
    Data(String),

    /// Tied observations; the model assumes a strictly ordered sample.
    #[error("tied observations: value {value} occurs more than once")]
    Tie { value: f64 },

    /// The prior/sample-size combination is known or suspected to give an improper posterior.
    #[error("refusing to sample: {0}")]
    Improper(String),

    /// A configuration value is invalid.
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { op, detail: detail.into() }
    }
}

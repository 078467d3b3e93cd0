use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quantile level {0} is outside (0, 1)")]
    QuantileLevel(f64),

    /// Characteristic-function argument outside the strip where the exponential moment exists.
    #[error("Im(u) = {im} lies outside the analyticity strip ({lower}, {upper})")]
    OutsideStrip { im: f64, lower: f64, upper: f64 },

    #[error("VG characteristic base has non-positive real part {real} at u = {u_re}{u_im:+}i")]
    BranchCut { real: f64, u_re: f64, u_im: f64 },

    #[error("sensitivity undefined at the jump location S0* = {s0_star}")]
    UndefinedAtJump { s0_star: f64 },

    #[error("Laguerre root {index} of order {order} did not converge")]
    RootNotConverged { order: usize, index: usize },

    #[error("non-finite integrand value at node {node}")]
    NonFiniteIntegrand { node: f64 },

    #[error("COS interval [{a}, {b}] does not contain the strike point 0")]
    IntervalExcludesStrike { a: f64, b: f64 },

    #[error("empty input")]
    Empty,

    #[error("level {level} times {count} samples is below one; the empirical quantile does not exist")]
    InsufficientSamples { level: f64, count: usize },

    #[error("pricing failed for scenario {index}: {source}")]
    ScenarioPricing {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

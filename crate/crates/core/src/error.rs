use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Unsupported or inconsistent configuration (orders, counts, flags).
    #[error("configuration error: {0}")]
    Config(String),

    /// Root-finding bracket does not straddle a sign change.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// Objective returned a non-finite value.
    #[error("non-finite evaluation at x = {x}")]
    Evaluation { x: f64 },

    /// Quadrature did not reach the requested tolerance at the order cap.
    #[error("no convergence at order {order}: estimate {estimate:e}, relative error bound {error_bound:e}")]
    Accuracy { estimate: f64, error_bound: f64, order: usize },

    /// A quantity that is not defined for this configuration.
    #[error("unavailable: {0}")]
    Capability(String),

    /// Gap target never reached inside the search window.
    #[error("gap target {target} dB not reached: achieved gaps span [{min_gap}, {max_gap}] dB")]
    Range { target: f64, min_gap: f64, max_gap: f64 },

    /// Gap curve crosses the target more than once; all crossings reported.
    #[error("gap crosses {target} dB at several BER levels (log10): {crossings:?}")]
    NonMonotone { target: f64, crossings: Vec<f64> },
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

use thiserror::Error;

/// Errors raised by calibration, coverage evaluation and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent or unknown configuration (family name, rule/point mismatch, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed tabulated input.
    #[error("format error: {0}")]
    Format(String),

    /// Well-formed input that cannot be a density.
    #[error("data error: {0}")]
    Data(String),

    /// The family does not satisfy a structural hypothesis the operation relies on.
    #[error("assumption error: {0}")]
    Assumption(String),

    /// No sign change was found while growing the bracket.
    #[error("root not found: {0}")]
    RootNotFound(String),

    /// The requested confidence lies outside the range the rule can reach.
    #[error("unattainable confidence {target}: attainable range is ({lo}, {hi})")]
    Unattainable { target: f64, lo: f64, hi: f64 },

    /// The compact-support bound needs `alpha > 1 - K^2`.
    #[error("infeasible alpha {alpha}: alpha <= 1 - K^2 = {min_alpha}")]
    InfeasibleAlpha { alpha: f64, min_alpha: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

pub(crate) fn check_c_above_one(c: f64) -> Result<()> {
    if c.is_finite() && c > 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("c must be finite and > 1, got {c}")))
    }
}

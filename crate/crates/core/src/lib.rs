//! Valid confidence intervals for a location `μ` and a scale `σ` built from
//! a single observation, together with the machinery to calibrate them and
//! to check their coverage by simulation.
//!
//! The crate is organized by task:
//!
//! * [`distributions`]: standardized symmetric families `f0` (normal,
//!   Cauchy, tabulated) and grid diagnostics for their shape hypotheses.
//! * [`coverage`]: exact coverage probabilities, their minimizers and the
//!   infimum coverage `ψ(c)` of `X ± c|X|`.
//! * [`calibrate`]: the constant `c` for a target confidence `1 - α`, for
//!   each of the six interval rules.
//! * [`montecarlo`]: a seeded, partition-stable simulation engine that
//!   checks each coverage claim independently.
//!
//! ```
//! use oneobs::{calibrate, coverage, distributions::Family, RuleKind};
//!
//! // X ± c|X| for one Cauchy observation at 75% confidence.
//! let fit = calibrate::calibrate_mean(0.25, &Family::cauchy(), RuleKind::MeanAr)?;
//! assert!((fit.rule.c - 2f64.sqrt()).abs() < 1e-6);
//! assert!((coverage::psi(&Family::cauchy(), fit.rule.c)? - 0.75).abs() < 1e-8);
//! # Ok::<(), oneobs::Error>(())
//! ```

pub mod calibrate;
pub mod coverage;
pub mod distributions;
mod error;
pub mod montecarlo;
pub mod numeric;
mod rule;

pub use error::{Error, Result};
pub use rule::{CompactBounds, Dims, IntervalRule, RuleKind};

// The guide's code blocks run as doctests, one module per chapter so a
// failure points at its chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/intervals.md")]
    mod intervals {}
    #[doc = include_str!("../../../book/src/calibration.md")]
    mod calibration {}
    #[doc = include_str!("../../../book/src/families.md")]
    mod families {}
    #[doc = include_str!("../../../book/src/compact-multivariate.md")]
    mod compact_multivariate {}
    #[doc = include_str!("../../../book/src/monte-carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

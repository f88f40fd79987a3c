//! Exact coverage probabilities of the single-observation intervals.
//!
//! Coverage depends on `(μ, σ)` only through the standardized mean
//! `λ = μ/σ` (written `θ` for general families) and is symmetric in it, so
//! every function here folds its argument to `|λ|`.
//!
//! For the interval `X ± c|X|` the event `|X - μ| ≤ c|X|` splits into
//! `X/σ ≥ λ/(c+1)` and `X/σ ≤ -λ/(c-1)`, which gives
//! `F0(cλ/(c+1)) + 1 - F0(cλ/(c-1))`. The minimizing `λ` is the root of
//! `f0(cλ/(c+1)) / f0(cλ/(c-1)) = (c+1)/(c-1)`, and the coverage at that
//! root is the infimum `ψ(c)` over all `(μ, σ)`.

use serde::{Deserialize, Serialize};

use crate::distributions::{phi, Family};
use crate::error::{check_c_above_one, Error, Result};
use crate::numeric::{bracketed_root, RootOptions};
use crate::rule::RuleKind;

/// Largest residual accepted for a root of the stationarity equation, in log space.
pub const THETA_RESIDUAL_TOL: f64 = 1e-9;

const THETA_BRACKET_LO: f64 = 1e-8;
const THETA_BRACKET_CAP: f64 = 1_152_921_504_606_846_976.0; // 2^60

/// `ln((c+1)/(c-1))` without cancellation near `c = 1` or for large `c`.
#[inline]
fn log_ratio(c: f64) -> f64 {
    (2.0 / (c - 1.0)).ln_1p()
}

/// Coverage of `X ± c|X|` under the normal model.
pub fn coverage_mean_ar(lambda: f64, c: f64) -> Result<f64> {
    check_c_above_one(c)?;
    let l = lambda.abs();
    Ok(phi(c / (c + 1.0) * l) + phi(-c / (c - 1.0) * l))
}

/// Coverage of `(-c|X|, c|X|)` under the normal model.
pub fn coverage_mean_stein(lambda: f64, c: f64) -> Result<f64> {
    check_c_above_one(c)?;
    let l = lambda.abs();
    Ok(phi((c - 1.0) / c * l) + phi(-(c + 1.0) / c * l))
}

/// Minimizer over `λ ≥ 0` of [`coverage_mean_ar`]:
/// `(c² - 1)/(√2 c^{3/2}) · √ln((c+1)/(c-1))`.
pub fn critical_lambda_ar(c: f64) -> Result<f64> {
    check_c_above_one(c)?;
    let c2m1 = (c - 1.0) * (c + 1.0);
    Ok(c2m1 / (std::f64::consts::SQRT_2 * c * c.sqrt()) * log_ratio(c).sqrt())
}

/// Minimizer over `λ ≥ 0` of [`coverage_mean_stein`]: `√((c/2) ln((c+1)/(c-1)))`.
pub fn critical_lambda_stein(c: f64) -> Result<f64> {
    check_c_above_one(c)?;
    Ok((0.5 * c * log_ratio(c)).sqrt())
}

/// Coverage of `X ± c|X|` when `X ~ (1/σ) f0((x - μ)/σ)` and `θ = μ/σ`.
pub fn coverage_mean_general(family: &Family, theta: f64, c: f64) -> Result<f64> {
    check_c_above_one(c)?;
    let t = theta.abs();
    Ok(family.cdf(c / (c + 1.0) * t) + family.sf(c / (c - 1.0) * t))
}

/// `P(|X|/σ ≤ c) = F0(θ + c) - F0(θ - c)`.
///
/// The `σ ≤ |X|/c` interval covers with probability one minus this value.
pub fn sigma_coverage(family: &Family, theta: f64, c: f64) -> Result<f64> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Domain(format!("c must be finite and positive, got {c}")));
    }
    let t = theta.abs();
    // Work in the upper tail when the window sits far out, where F0 ≈ 1.
    Ok(if t > c {
        family.sf(t - c) - family.sf(t + c)
    } else {
        family.cdf(t + c) - family.cdf(t - c)
    })
}

/// The minimizing standardized mean for `X ± c|X|` under a general family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaRoot {
    pub c: f64,
    pub theta: f64,
    /// `ln f0(cθ/(c+1)) - ln f0(cθ/(c-1)) - ln((c+1)/(c-1))` at `theta`.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub iterations: u32,
}

/// Solves `f0(cθ/(c+1)) / f0(cθ/(c-1)) = (c+1)/(c-1)` for `θ > 0`.
///
/// The equation is solved in log space so that densities underflowing far
/// in the tail do not stall the search. The bracket starts at `[1e-8, 1]`
/// and its upper end doubles until the sign changes; past `2^60` the family
/// is taken to violate the hypotheses and the search fails.
pub fn theta_root(family: &Family, c: f64) -> Result<ThetaRoot> {
    check_c_above_one(c)?;
    let a = c / (c + 1.0);
    let b = c / (c - 1.0);
    let target = log_ratio(c);
    let h = |t: f64| {
        let la = family.ln_pdf(a * t);
        let lb = family.ln_pdf(b * t);
        match (la.is_finite(), lb.is_finite()) {
            (true, true) => la - lb - target,
            (_, false) => f64::INFINITY,
            (false, true) => f64::NEG_INFINITY,
        }
    };

    let mut lo = THETA_BRACKET_LO;
    while h(lo) >= 0.0 {
        lo *= 1e-4;
        if lo < 1e-300 {
            return Err(Error::RootNotFound(format!(
                "stationarity equation has no negative value near 0 for c = {c}"
            )));
        }
    }
    let mut hi = 1.0_f64.max(2.0 * lo);
    while h(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > THETA_BRACKET_CAP {
            return Err(Error::RootNotFound(format!(
                "no sign change up to theta = 2^60 for c = {c} (family {}); hypotheses likely violated",
                family.name()
            )));
        }
    }

    let opts = RootOptions { f_tol: 1e-14, x_rtol: 1e-15, max_iter: 400 };
    let root = bracketed_root(h, lo, hi, opts)?;
    if !(root.residual.abs() <= THETA_RESIDUAL_TOL) {
        return Err(Error::RootNotFound(format!(
            "stationarity equation is discontinuous at theta = {} for c = {c} (residual {})",
            root.x, root.residual
        )));
    }
    Ok(ThetaRoot {
        c,
        theta: root.x,
        residual: root.residual,
        bracket: root.bracket,
        iterations: root.iterations,
    })
}

/// Infimum over `(μ, σ)` of the coverage of `X ± c|X|`.
pub fn psi(family: &Family, c: f64) -> Result<f64> {
    let root = theta_root(family, c)?;
    coverage_mean_general(family, root.theta, c)
}

/// One `(λ, coverage)` sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub lambda: f64,
    pub coverage: f64,
}

/// Coverage of one rule as a function of the standardized mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCurve {
    pub family: String,
    pub rule_kind: RuleKind,
    pub c: f64,
    pub points: Vec<CurvePoint>,
    /// Analytic location and value of the minimal coverage over `λ ≥ 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimizer: Option<CurvePoint>,
}

impl CoverageCurve {
    /// Grid point with the smallest coverage.
    pub fn grid_minimum(&self) -> Option<CurvePoint> {
        self.points
            .iter()
            .copied()
            .min_by(|p, q| p.coverage.total_cmp(&q.coverage))
    }
}

/// Evaluates the exact coverage of a `kind` rule with constant `c` on `grid`.
pub fn coverage_curve(family: &Family, kind: RuleKind, c: f64, grid: &[f64]) -> Result<CoverageCurve> {
    let cover: Box<dyn Fn(f64) -> Result<f64> + '_> = match kind {
        RuleKind::MeanAr => {
            check_c_above_one(c)?;
            if family.is_normal() {
                Box::new(move |l| coverage_mean_ar(l, c))
            } else {
                Box::new(move |l| coverage_mean_general(family, l, c))
            }
        }
        RuleKind::MeanStein => {
            check_c_above_one(c)?;
            if !family.is_normal() {
                return Err(Error::Config("the mean-stein curve is available for the normal family only".into()));
            }
            Box::new(move |l| coverage_mean_stein(l, c))
        }
        RuleKind::SigmaNormal | RuleKind::SigmaGeneral => {
            if kind == RuleKind::SigmaNormal && !family.is_normal() {
                return Err(Error::Config("sigma-normal requires the normal family".into()));
            }
            Box::new(move |l| sigma_coverage(family, l, c).map(|p| 1.0 - p))
        }
        RuleKind::SigmaCompact | RuleKind::MeanMultivariate => {
            return Err(Error::Config(format!("{kind} coverage is not a function of a standardized mean")))
        }
    };

    let points = grid
        .iter()
        .map(|&lambda| Ok(CurvePoint { lambda, coverage: cover(lambda)? }))
        .collect::<Result<Vec<_>>>()?;

    let minimizer = match kind {
        RuleKind::MeanAr if family.is_normal() => Some(critical_lambda_ar(c)?),
        RuleKind::MeanAr => theta_root(family, c).ok().map(|r| r.theta),
        RuleKind::MeanStein => Some(critical_lambda_stein(c)?),
        _ if family.strictly_unimodal() => Some(0.0),
        _ => None,
    };
    let minimizer = match minimizer {
        Some(lambda) => Some(CurvePoint { lambda, coverage: cover(lambda)? }),
        None => None,
    };

    Ok(CoverageCurve {
        family: family.name().to_string(),
        rule_kind: kind,
        c,
        points,
        minimizer,
    })
}

//! Solving for the constant `c` that gives a rule its target confidence.
//!
//! The mean rules and the two `σ` rules for symmetric families are
//! calibrated exactly: their infimum coverage equals `1 - α`. The
//! compact-support and multivariate rules come from probability bounds, so
//! their infimum coverage is only guaranteed to be at least `1 - α`.

use serde::{Deserialize, Serialize};

use crate::coverage::{coverage_mean_stein, critical_lambda_stein, psi, sigma_coverage};
use crate::distributions::{std_normal_quantile, Family};
use crate::error::{check_alpha, Error, Result};
use crate::numeric::{bracketed_root, RootOptions};
use crate::rule::{CompactBounds, Dims, IntervalRule, RuleKind};

/// Search interval for the mean-rule constant.
pub const MEAN_C_BRACKET: (f64, f64) = (1.0 + 1e-6, 1e6);

/// Headline multiplier of the multivariate rule.
pub const MULTIVARIATE_HEADLINE: f64 = 3.85;

/// A calibrated rule with solver diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub rule: IntervalRule,
    /// Infimum coverage at the returned `c` (exact rules) or the guaranteed
    /// lower bound on it (bound-based rules).
    pub achieved_inf_coverage: f64,
    /// `achieved_inf_coverage - (1 - alpha)` as evaluated at the solution.
    pub residual: f64,
    pub iterations: u32,
    pub bracket: (f64, f64),
    /// Whether `achieved_inf_coverage` is a bound rather than an exact value.
    pub bound_based: bool,
    /// Multivariate only: the sharper constant `e·√(2a)·α^(-1/(pm))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refined_c: Option<f64>,
}

fn closed_form(rule: IntervalRule, achieved: f64, bound_based: bool) -> CalibrationResult {
    let c = rule.c;
    let residual = achieved - (1.0 - rule.alpha);
    CalibrationResult {
        rule,
        achieved_inf_coverage: achieved,
        residual,
        iterations: 0,
        bracket: (c, c),
        bound_based,
        refined_c: None,
    }
}

/// Minimal coverage over `λ` of a mean rule with constant `c`.
fn mean_min_coverage(family: &Family, kind: RuleKind, c: f64) -> Result<f64> {
    if kind == RuleKind::MeanStein && family.is_normal() {
        coverage_mean_stein(critical_lambda_stein(c)?, c)
    } else {
        // The Stein interval is a reparametrization of X ± c|X| in λ, so both
        // share the same infimum for every family.
        psi(family, c)
    }
}

/// Finds `c > 1` with infimum coverage exactly `1 - alpha` for `X ± c|X|`
/// or `(-c|X|, c|X|)`.
pub fn calibrate_mean(alpha: f64, family: &Family, kind: RuleKind) -> Result<CalibrationResult> {
    check_alpha(alpha)?;
    if !kind.is_mean() {
        return Err(Error::Config(format!("calibrate_mean got non-mean kind {kind}")));
    }
    let target = 1.0 - alpha;
    let (lo, hi) = MEAN_C_BRACKET;
    let at_lo = mean_min_coverage(family, kind, lo)?;
    let at_hi = mean_min_coverage(family, kind, hi)?;
    if !(at_lo < target && target < at_hi) {
        return Err(Error::Unattainable { target, lo: at_lo, hi: at_hi });
    }

    let mut failure = None;
    let f = |c: f64| match mean_min_coverage(family, kind, c) {
        Ok(v) => v - target,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let opts = RootOptions { f_tol: 1e-14, x_rtol: 1e-15, max_iter: 500 };
    let root = bracketed_root(f, lo, hi, opts);
    if let Some(e) = failure {
        return Err(e);
    }
    let root = root?;
    Ok(CalibrationResult {
        rule: IntervalRule {
            kind,
            c: root.x,
            alpha,
            family: Some(family.name().to_string()),
            compact_bounds: None,
            dims: None,
        },
        achieved_inf_coverage: target + root.residual,
        residual: root.residual,
        iterations: root.iterations,
        bracket: root.bracket,
        bound_based: false,
        refined_c: None,
    })
}

/// `σ ≤ |X|/c` under the normal model with `c = Φ⁻¹((1 + α)/2)`; the
/// infimum coverage `1 - α` is attained at `μ = 0`.
pub fn calibrate_sigma_normal(alpha: f64) -> Result<CalibrationResult> {
    check_alpha(alpha)?;
    let c = std_normal_quantile(0.5 * (1.0 + alpha))?;
    let achieved = 1.0 - sigma_coverage(&Family::normal(), 0.0, c)?;
    let rule = IntervalRule {
        kind: RuleKind::SigmaNormal,
        c,
        alpha,
        family: Some("normal".into()),
        compact_bounds: None,
        dims: None,
    };
    Ok(closed_form(rule, achieved, false))
}

/// `σ ≤ |X|/c` for a symmetric, strictly unimodal family, with `c` solving
/// `F0(c) - 1/2 = α/2`.
pub fn calibrate_sigma_general(alpha: f64, family: &Family) -> Result<CalibrationResult> {
    check_alpha(alpha)?;
    if !(family.symmetric() && family.strictly_unimodal()) {
        return Err(Error::Assumption(format!(
            "family {} is not strictly decreasing on [0, inf); the sigma bound does not apply",
            family.name()
        )));
    }
    let half = 0.5 * alpha;
    let g = |c: f64| (family.cdf(c) - 0.5) - half;
    let mut hi = 1.0;
    while g(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::RootNotFound(format!("cannot bracket F0(c) = {}", 0.5 + half)));
        }
    }
    let opts = RootOptions { f_tol: 1e-16, x_rtol: 1e-15, max_iter: 500 };
    let root = bracketed_root(g, 0.0, hi, opts)?;
    let c = root.x;
    let achieved = 1.0 - sigma_coverage(family, 0.0, c)?;
    Ok(CalibrationResult {
        rule: IntervalRule {
            kind: RuleKind::SigmaGeneral,
            c,
            alpha,
            family: Some(family.name().to_string()),
            compact_bounds: None,
            dims: None,
        },
        achieved_inf_coverage: achieved,
        residual: achieved - (1.0 - alpha),
        iterations: root.iterations,
        bracket: root.bracket,
        bound_based: false,
        refined_c: None,
    })
}

/// `σ² ≤ X²/c²` for any law with `a ≤ |X| ≤ b`, with
/// `c² = 1 - √(1 - α)/K` and `K² = 4/(b/a + a/b)²`.
///
/// The guarantee needs `α > 1 - K²`; otherwise the error carries that
/// minimal feasible `α`.
pub fn calibrate_sigma_compact(alpha: f64, a: f64, b: f64) -> Result<CalibrationResult> {
    check_alpha(alpha)?;
    let bounds = CompactBounds::new(a, b)?;
    let min_alpha = bounds.one_minus_k_squared();
    if alpha <= min_alpha {
        return Err(Error::InfeasibleAlpha { alpha, min_alpha });
    }
    let k = bounds.k_squared().sqrt();
    let s = (1.0 - alpha).sqrt();
    // 1 - s/K = (K² - (1 - α)) / (K (K + s)) with K² - (1 - α) = α - (1 - K²).
    let c2 = ((alpha - min_alpha) / (k * (k + s))).max(0.0);
    let c = c2.sqrt();
    // Paley-Zygmund lower bound (1 - c²)² K² at this c.
    let bound = (1.0 - c2).powi(2) * bounds.k_squared();
    let rule = IntervalRule {
        kind: RuleKind::SigmaCompact,
        c,
        alpha,
        family: None,
        compact_bounds: Some(bounds),
        dims: None,
    };
    Ok(closed_form(rule, bound, true))
}

/// `‖μ‖ ≤ c‖X‖/√m` for `m` draws from `N_p(μ, Σ)`, with the headline
/// constant `c = 3.85·α^(-1/(pm))`.
///
/// The sharper constant `√(2e²a)·α^(-1/(pm))` with
/// `a = 1/(1 - exp(1 - 2π e^{p/4}))` is returned in `refined_c`.
pub fn calibrate_multivariate(alpha: f64, p: usize, m: usize) -> Result<CalibrationResult> {
    check_alpha(alpha)?;
    if p == 0 || m == 0 {
        return Err(Error::Domain(format!("p and m must be positive, got p = {p}, m = {m}")));
    }
    let pm = (p * m) as f64;
    let inflate = alpha.powf(-1.0 / pm);
    let c = MULTIVARIATE_HEADLINE * inflate;
    let refined = (2.0 * multivariate_a(p)).sqrt() * std::f64::consts::E * inflate;
    let rule = IntervalRule {
        kind: RuleKind::MeanMultivariate,
        c,
        alpha,
        family: None,
        compact_bounds: None,
        dims: Some(Dims { p, m }),
    };
    let mut out = closed_form(rule, 1.0 - alpha, true);
    out.refined_c = Some(refined);
    Ok(out)
}

/// `a = 1/(1 - exp(1 - 2π e^{p/4}))`.
pub fn multivariate_a(p: usize) -> f64 {
    let x = 1.0 - 2.0 * std::f64::consts::PI * (p as f64 / 4.0).exp();
    1.0 / -x.exp_m1()
}

/// Mean and `σ` rules whose rectangle covers `(μ, σ)` jointly with
/// probability at least `1 - alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointCalibration {
    pub alpha: f64,
    pub split: f64,
    pub mean: CalibrationResult,
    pub sigma: CalibrationResult,
}

/// Bonferroni split: `alpha·split` goes to `X ± c|X|` and the rest to the
/// `σ` interval.
pub fn bonferroni_joint(alpha: f64, split: f64, family: &Family) -> Result<JointCalibration> {
    check_alpha(alpha)?;
    if !(split > 0.0 && split < 1.0) {
        return Err(Error::Domain(format!("split must lie in (0, 1), got {split}")));
    }
    let mean = calibrate_mean(alpha * split, family, RuleKind::MeanAr)?;
    let sigma_alpha = alpha * (1.0 - split);
    let sigma = if family.is_normal() {
        calibrate_sigma_normal(sigma_alpha)?
    } else {
        calibrate_sigma_general(sigma_alpha, family)?
    };
    Ok(JointCalibration { alpha, split, mean, sigma })
}

//! Standardized symmetric location-scale families.
//!
//! A [`Family`] is the standardized density `f0` of the model
//! `X ~ (1/σ) f0((x - μ)/σ)`. Two closed-form families are built in (normal
//! and Cauchy); others can be supplied as a table of density samples on
//! `z >= 0`, which is extended to the whole line by symmetry.

mod normal;
mod table;

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

pub use normal::{std_normal_cdf, std_normal_quantile};
pub use table::parse_table_csv;

pub(crate) use normal::{cdf as phi, quantile as phi_inv};

use table::Tabulated;

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Normal,
    Cauchy,
    Tabulated(Box<Tabulated>),
}

/// A standardized, symmetric density `f0` with its distribution function.
///
/// Families are immutable once built and can be shared freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    name: String,
    shape: Shape,
    symmetric: bool,
    strictly_unimodal: bool,
}

/// Builtin families addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinFamily {
    Normal,
    Cauchy,
}

impl std::str::FromStr for BuiltinFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(BuiltinFamily::Normal),
            "cauchy" => Ok(BuiltinFamily::Cauchy),
            other => Err(Error::Config(format!("unknown family {other:?}; expected normal or cauchy"))),
        }
    }
}

/// Builds a closed-form family by name (`"normal"` or `"cauchy"`).
pub fn make_builtin_family(name: &str) -> Result<Family> {
    Ok(Family::builtin(name.parse()?))
}

/// Builds a family from `(z, f0(z))` samples with `z` strictly increasing from 0.
///
/// The density is interpolated by a monotone cubic, reflected to `z < 0`
/// and renormalized to unit mass. Tables whose raw mass is more than 10%
/// away from one are rejected as not being densities.
pub fn make_family_from_table(name: impl Into<String>, rows: &[(f64, f64)]) -> Result<Family> {
    let table = Tabulated::new(rows)?;
    let strictly_unimodal = table.strictly_decreasing();
    Ok(Family {
        name: name.into(),
        shape: Shape::Tabulated(Box::new(table)),
        symmetric: true,
        strictly_unimodal,
    })
}

impl Family {
    pub fn builtin(which: BuiltinFamily) -> Family {
        let (name, shape) = match which {
            BuiltinFamily::Normal => ("normal", Shape::Normal),
            BuiltinFamily::Cauchy => ("cauchy", Shape::Cauchy),
        };
        Family { name: name.to_string(), shape, symmetric: true, strictly_unimodal: true }
    }

    pub fn normal() -> Family {
        Family::builtin(BuiltinFamily::Normal)
    }

    pub fn cauchy() -> Family {
        Family::builtin(BuiltinFamily::Cauchy)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_normal(&self) -> bool {
        matches!(self.shape, Shape::Normal)
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    /// Whether `f0` is strictly decreasing on `(0, support_radius)`; for
    /// tabulated families this is judged on the sample values.
    pub fn strictly_unimodal(&self) -> bool {
        self.strictly_unimodal
    }

    /// Half-width of the support; infinite for the builtin families.
    pub fn support_radius(&self) -> f64 {
        match &self.shape {
            Shape::Normal | Shape::Cauchy => f64::INFINITY,
            Shape::Tabulated(t) => t.support_radius(),
        }
    }

    /// Total mass of the table before renormalization (1 for closed forms).
    pub fn raw_mass(&self) -> f64 {
        match &self.shape {
            Shape::Tabulated(t) => t.raw_mass,
            _ => 1.0,
        }
    }

    pub fn pdf(&self, z: f64) -> f64 {
        match &self.shape {
            Shape::Normal => normal::pdf(z),
            Shape::Cauchy => 1.0 / (PI * (1.0 + z * z)),
            Shape::Tabulated(t) => t.pdf(z),
        }
    }

    /// `ln f0(z)`, evaluated without underflow for the closed forms.
    pub fn ln_pdf(&self, z: f64) -> f64 {
        match &self.shape {
            Shape::Normal => normal::ln_pdf(z),
            Shape::Cauchy => -(PI.ln() + (z * z).ln_1p()),
            Shape::Tabulated(t) => t.pdf(z).ln(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Normal => normal::cdf(x),
            Shape::Cauchy => cauchy_cdf(x),
            Shape::Tabulated(t) => t.cdf(x),
        }
    }

    /// Upper tail `1 - F0(x)`, computed as `F0(-x)` to avoid cancellation.
    pub fn sf(&self, x: f64) -> f64 {
        self.cdf(-x)
    }

    /// Inverse distribution function for `p` in (0, 1).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile needs p in (0, 1), got {p}")));
        }
        Ok(self.quantile_unchecked(p))
    }

    #[inline]
    pub(crate) fn quantile_unchecked(&self, p: f64) -> f64 {
        match &self.shape {
            Shape::Normal => normal::quantile(p),
            Shape::Cauchy => (PI * (p - 0.5)).tan(),
            Shape::Tabulated(t) => t.quantile(p),
        }
    }
}

fn cauchy_cdf(x: f64) -> f64 {
    // For large |x| use arctan(x) = ±π/2 - arctan(1/x) so the far tail keeps
    // relative precision.
    if x < -1.0 {
        (-1.0 / x).atan() / PI
    } else if x > 1.0 {
        1.0 - (1.0 / x).atan() / PI
    } else {
        0.5 + x.atan() / PI
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Tolerance below which grid violations are ignored.
pub const ASSUMPTION_TOL: f64 = 1e-8;

/// Grid diagnostics for the scale-family hypotheses behind the general
/// mean interval. A `true` flag means no violation was found on the grid,
/// not that the property holds.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AssumptionReport {
    /// `g(θ|a1)/g(θ|a2)` is nondecreasing in `θ` for every `a1 < a2`.
    pub mlr_ok: bool,
    /// `ln g(θ|a1)/g(θ|a2)` is convex in `θ` for every `a1 < a2`.
    pub logconvex_ok: bool,
    /// Sampled `f0` is strictly decreasing on the positive half of the grid.
    pub unimodal_ok: bool,
    pub mlr_violation: f64,
    pub logconvex_violation: f64,
    pub worst_violation: f64,
    /// Set when `f0` vanished at a grid point where the ratio was needed.
    pub inconclusive: bool,
    pub grid_spec: String,
}

/// Checks, on a grid, the monotone-likelihood-ratio and log-convexity
/// hypotheses for the scale family `g(θ|a) = a f0(aθ)`.
///
/// For each pair `a1 < a2` from `scale_grid` the log-ratio
/// `L(θ) = ln g(θ|a1) - ln g(θ|a2)` is evaluated on `theta_grid`; MLR asks
/// `L` to be nondecreasing and log-convexity asks every interior point to
/// lie on or below the chord of its neighbours.
pub fn validate_assumptions(family: &Family, theta_grid: &[f64], scale_grid: &[f64]) -> Result<AssumptionReport> {
    check_grid("theta_grid", theta_grid)?;
    check_grid("scale_grid", scale_grid)?;

    let mut mlr_violation: f64 = 0.0;
    let mut convex_violation: f64 = 0.0;
    let mut inconclusive = false;

    for (i, &a1) in scale_grid.iter().enumerate() {
        for &a2 in &scale_grid[i + 1..] {
            let mut log_ratio = Vec::with_capacity(theta_grid.len());
            for &t in theta_grid {
                let l1 = a1.ln() + family.ln_pdf(a1 * t);
                let l2 = a2.ln() + family.ln_pdf(a2 * t);
                if !l1.is_finite() || !l2.is_finite() {
                    inconclusive = true;
                    log_ratio.push(None);
                } else {
                    log_ratio.push(Some(l1 - l2));
                }
            }
            for w in log_ratio.windows(2) {
                if let [Some(x), Some(y)] = w {
                    mlr_violation = mlr_violation.max(x - y);
                }
            }
            for k in 1..theta_grid.len().saturating_sub(1) {
                if let (Some(l0), Some(l1), Some(l2)) = (log_ratio[k - 1], log_ratio[k], log_ratio[k + 1]) {
                    let (t0, t1, t2) = (theta_grid[k - 1], theta_grid[k], theta_grid[k + 1]);
                    let w = (t2 - t1) / (t2 - t0);
                    let chord = w * l0 + (1.0 - w) * l2;
                    convex_violation = convex_violation.max(l1 - chord);
                }
            }
        }
    }

    let mut unimodal_violation: f64 = 0.0;
    let mut prev = family.pdf(0.0);
    for &t in theta_grid {
        let v = family.pdf(t);
        if v == 0.0 && prev == 0.0 {
            continue;
        }
        // Strictness: an equal step counts as a (zero-size) failure.
        if v >= prev && t > 0.0 {
            unimodal_violation = unimodal_violation.max((v - prev).max(f64::MIN_POSITIVE));
        }
        prev = v;
    }

    let worst = mlr_violation.max(convex_violation);
    Ok(AssumptionReport {
        mlr_ok: mlr_violation <= ASSUMPTION_TOL,
        logconvex_ok: convex_violation <= ASSUMPTION_TOL,
        unimodal_ok: unimodal_violation == 0.0,
        mlr_violation,
        logconvex_violation: convex_violation,
        worst_violation: worst,
        inconclusive,
        grid_spec: format!(
            "theta: {} points in [{}, {}]; scales: {:?}",
            theta_grid.len(),
            theta_grid[0],
            theta_grid[theta_grid.len() - 1],
            scale_grid
        ),
    })
}

fn check_grid(label: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain(format!("{label} is empty")));
    }
    if grid.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
        return Err(Error::Domain(format!("{label} must contain finite positive values")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(format!("{label} must be strictly increasing")));
    }
    Ok(())
}

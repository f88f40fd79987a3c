//! Seeded simulation of coverage events.
//!
//! Each run draws `n` independent replicates of the rule's model and counts
//! how often the rule's interval contains the true parameter. Replicates are
//! split into a fixed number of partitions, each with its own keyed random
//! stream, and the partition counts are added exactly; results therefore
//! depend only on `(seed, n, point, partitions)`.

mod compact;
mod covariance;
mod rng;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibrate::calibrate_multivariate;
use crate::coverage::{coverage_mean_general, coverage_mean_stein, psi, sigma_coverage};
use crate::distributions::{phi, Family};
use crate::error::{Error, Result};
use crate::rule::{IntervalRule, RuleKind};

pub use compact::CompactDist;
pub use covariance::{CovarianceSpec, Factor, PD_TOL};
pub use rng::derive_seed;

use rng::{std_normal, stream, uniform, Stream};

pub const DEFAULT_PARTITIONS: u32 = 16;

/// Largest dimension the multivariate sampler accepts.
pub const MAX_SIM_DIM: usize = 64;

/// Replicate count, master seed and partition count of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub n: u64,
    pub seed: u64,
    pub partitions: u32,
}

impl McConfig {
    pub fn new(n: u64, seed: u64) -> Self {
        McConfig { n, seed, partitions: DEFAULT_PARTITIONS }
    }

    pub fn with_partitions(mut self, partitions: u32) -> Self {
        self.partitions = partitions;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("need at least one replicate".into()));
        }
        if self.partitions == 0 {
            return Err(Error::Config("need at least one partition".into()));
        }
        Ok(())
    }
}

/// Where in the parameter space a coverage event is simulated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ParameterPoint {
    /// `μ = lambda`, `σ = 1`.
    Standardized { lambda: f64 },
    LocationScale { mu: f64, sigma: f64 },
    Compact { dist: CompactDist },
    /// Mean vector `nu` and covariance of each of the `m` draws.
    Multivariate { nu: Vec<f64>, sigma: CovarianceSpec },
}

impl ParameterPoint {
    /// Standardized mean `μ/σ` for univariate points.
    pub fn lambda(&self) -> Option<f64> {
        match self {
            ParameterPoint::Standardized { lambda } => Some(*lambda),
            ParameterPoint::LocationScale { mu, sigma } => Some(mu / sigma),
            _ => None,
        }
    }
}

/// Outcome of one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub rule: IntervalRule,
    pub parameter_point: ParameterPoint,
    pub n_reps: u64,
    pub hits: u64,
    pub coverage_hat: f64,
    pub std_error: f64,
    pub seed: u64,
    pub partitions: u32,
    pub wall_time: f64,
}

impl MonteCarloReport {
    fn new(rule: IntervalRule, point: ParameterPoint, cfg: &McConfig, hits: u64, started: Instant) -> Self {
        let p = hits as f64 / cfg.n as f64;
        MonteCarloReport {
            rule,
            parameter_point: point,
            n_reps: cfg.n,
            hits,
            coverage_hat: p,
            std_error: (p * (1.0 - p) / cfg.n as f64).sqrt(),
            seed: cfg.seed,
            partitions: cfg.partitions,
            wall_time: started.elapsed().as_secs_f64(),
        }
    }

    /// `coverage_hat ≥ bound - k·std_error`.
    pub fn meets_bound(&self, bound: f64, k: f64) -> bool {
        self.coverage_hat >= bound - k * self.std_error
    }

    /// `|coverage_hat - value| ≤ k·std_error`.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.coverage_hat - value).abs() <= k * self.std_error
    }
}

/// Counts successes of `trial` over `cfg.n` replicates split across partitions.
fn count_hits<F>(cfg: &McConfig, trial: F) -> u64
where
    F: Fn(&mut Stream) -> bool + Sync,
{
    let k = cfg.partitions as u64;
    let base = cfg.n / k;
    let extra = cfg.n % k;
    (0..k)
        .into_par_iter()
        .map(|part| {
            let reps = base + u64::from(part < extra);
            let mut rng = stream(cfg.seed, part);
            let mut hits = 0u64;
            for _ in 0..reps {
                hits += u64::from(trial(&mut rng));
            }
            hits
        })
        .sum()
}

fn check_family(rule: &IntervalRule, family: &Family) -> Result<()> {
    match rule.family.as_deref() {
        Some(name) if name == family.name() => Ok(()),
        other => Err(Error::Config(format!(
            "rule was calibrated for family {other:?} but simulation uses {}",
            family.name()
        ))),
    }
}

/// Simulates the rule's coverage event at one parameter point.
///
/// Univariate rules draw `X = μ + σ F0⁻¹(U)` from `family`; the compact
/// rule draws from the point's law; the multivariate rule draws `m`
/// vectors from `N_p(ν, Σ)` per replicate. `family` is ignored for the
/// last two.
pub fn simulate_coverage(
    rule: &IntervalRule,
    family: &Family,
    point: &ParameterPoint,
    cfg: &McConfig,
) -> Result<MonteCarloReport> {
    rule.validate()?;
    cfg.check()?;
    match (rule.kind, point) {
        (RuleKind::SigmaCompact, ParameterPoint::Compact { dist }) => simulate_compact(rule, dist, cfg),
        (RuleKind::MeanMultivariate, ParameterPoint::Multivariate { nu, sigma }) => {
            run_multivariate(rule, nu, sigma, cfg)
        }
        (RuleKind::SigmaCompact | RuleKind::MeanMultivariate, _) => Err(Error::Config(format!(
            "{} rule cannot be simulated at a univariate point",
            rule.kind
        ))),
        (_, ParameterPoint::Standardized { .. } | ParameterPoint::LocationScale { .. }) => {
            check_family(rule, family)?;
            let (mu, sigma) = match *point {
                ParameterPoint::Standardized { lambda } => (lambda, 1.0),
                ParameterPoint::LocationScale { mu, sigma } => (mu, sigma),
                _ => unreachable!(),
            };
            if !(mu.is_finite() && sigma.is_finite() && sigma > 0.0) {
                return Err(Error::Config(format!("invalid point mu = {mu}, sigma = {sigma}")));
            }
            let started = Instant::now();
            let c = rule.c;
            let draw = |rng: &mut Stream| mu + sigma * family.quantile_unchecked(uniform(rng));
            let hits = match rule.kind {
                RuleKind::MeanAr => count_hits(cfg, |rng| {
                    let x = draw(rng);
                    (x - mu).abs() <= c * x.abs()
                }),
                RuleKind::MeanStein => count_hits(cfg, |rng| mu.abs() <= c * draw(rng).abs()),
                _ => count_hits(cfg, |rng| sigma * c <= draw(rng).abs()),
            };
            Ok(MonteCarloReport::new(rule.clone(), point.clone(), cfg, hits, started))
        }
        (kind, _) => Err(Error::Config(format!("{kind} rule cannot be simulated at this point"))),
    }
}

/// Simulates `σ² ≤ X²/c²` under a compactly supported law, with `σ²`
/// computed exactly from the law.
pub fn simulate_compact(rule: &IntervalRule, dist: &CompactDist, cfg: &McConfig) -> Result<MonteCarloReport> {
    rule.validate()?;
    cfg.check()?;
    let bounds = match (rule.kind, rule.compact_bounds) {
        (RuleKind::SigmaCompact, Some(b)) => b,
        _ => return Err(Error::Config("simulate_compact needs a sigma-compact rule".into())),
    };
    dist.validate(&bounds)?;
    let started = Instant::now();
    let threshold = rule.c * rule.c * dist.variance();
    let hits = count_hits(cfg, |rng| {
        let x = dist.sample(rng);
        threshold <= x * x
    });
    let point = ParameterPoint::Compact { dist: dist.clone() };
    Ok(MonteCarloReport::new(rule.clone(), point, cfg, hits, started))
}

/// Calibrates the multivariate rule for `(alpha, p, m)` and simulates
/// `‖ν‖ ≤ c·√(Σ_j ‖X_j‖²)/√m` with `X_j ~ N_p(ν, Σ)`.
pub fn simulate_multivariate(
    alpha: f64,
    p: usize,
    m: usize,
    nu: &[f64],
    sigma: &CovarianceSpec,
    cfg: &McConfig,
) -> Result<MonteCarloReport> {
    let rule = calibrate_multivariate(alpha, p, m)?.rule;
    cfg.check()?;
    run_multivariate(&rule, nu, sigma, cfg)
}

fn run_multivariate(rule: &IntervalRule, nu: &[f64], sigma: &CovarianceSpec, cfg: &McConfig) -> Result<MonteCarloReport> {
    let dims = rule.dims.ok_or_else(|| Error::Config("multivariate rule has no dimensions".into()))?;
    let (p, m) = (dims.p, dims.m);
    if p > MAX_SIM_DIM {
        return Err(Error::Config(format!("simulation supports p <= {MAX_SIM_DIM}, got {p}")));
    }
    if nu.len() != p {
        return Err(Error::Config(format!("mean vector has length {}, expected p = {p}", nu.len())));
    }
    if nu.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("mean vector has non-finite entries".into()));
    }
    let factor = sigma.factor(p)?;
    let started = Instant::now();
    let norm2: f64 = nu.iter().map(|v| v * v).sum();
    // ‖ν‖ ≤ c √(S/m)  ⇔  m ‖ν‖² ≤ c² S.
    let lhs = m as f64 * norm2;
    let c2 = rule.c * rule.c;
    let hits = count_hits(cfg, |rng| {
        let mut z = [0.0f64; MAX_SIM_DIM];
        let mut x = [0.0f64; MAX_SIM_DIM];
        let mut s = 0.0;
        for _ in 0..m {
            for zi in z[..p].iter_mut() {
                *zi = std_normal(rng);
            }
            factor.apply(&z[..p], &mut x[..p]);
            s += x[..p].iter().zip(nu).map(|(xi, mi)| (xi + mi) * (xi + mi)).sum::<f64>();
        }
        lhs <= c2 * s
    });
    let point = ParameterPoint::Multivariate { nu: nu.to_vec(), sigma: sigma.clone() };
    Ok(MonteCarloReport::new(rule.clone(), point, cfg, hits, started))
}

/// Exact coverage of a rule at a point, where known.
pub fn analytic_coverage(rule: &IntervalRule, family: &Family, point: &ParameterPoint) -> Option<f64> {
    if let (RuleKind::SigmaCompact, ParameterPoint::Compact { dist }) = (rule.kind, point) {
        return Some(dist.prob_square_at_least(rule.c * rule.c * dist.variance()));
    }
    let lambda = point.lambda()?;
    match rule.kind {
        RuleKind::MeanAr => coverage_mean_general(family, lambda, rule.c).ok(),
        RuleKind::MeanStein if family.is_normal() => coverage_mean_stein(lambda, rule.c).ok(),
        RuleKind::MeanStein if rule.c > 1.0 => {
            // |λ + Z| ≥ |λ|/c.
            let (t, c) = (lambda.abs(), rule.c);
            Some(family.cdf((c - 1.0) / c * t) + family.sf((c + 1.0) / c * t))
        }
        RuleKind::SigmaNormal | RuleKind::SigmaGeneral => sigma_coverage(family, lambda, rule.c).ok().map(|v| 1.0 - v),
        _ => None,
    }
}

/// Exact infimum coverage over the parameter space, where known.
pub fn analytic_infimum(rule: &IntervalRule, family: &Family) -> Option<f64> {
    match rule.kind {
        RuleKind::MeanAr | RuleKind::MeanStein => psi(family, rule.c).ok(),
        RuleKind::SigmaNormal | RuleKind::SigmaGeneral if family.strictly_unimodal() => {
            sigma_coverage(family, 0.0, rule.c).ok().map(|v| 1.0 - v)
        }
        _ => None,
    }
}

/// Simulated coverage over a grid of parameter points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub rule: IntervalRule,
    pub grid: Vec<ParameterPoint>,
    pub per_point: Vec<MonteCarloReport>,
    pub empirical_infimum: f64,
    pub argmin_point: ParameterPoint,
}

impl ScanReport {
    /// Report at the grid point with the smallest estimated coverage.
    pub fn argmin_report(&self) -> &MonteCarloReport {
        self.per_point
            .iter()
            .find(|r| r.parameter_point == self.argmin_point)
            .expect("argmin is one of the grid points")
    }
}

/// Runs [`simulate_coverage`] at each grid point; point `i` uses the seed
/// [`derive_seed`]`(cfg.seed, i)`.
pub fn scan_infimum(rule: &IntervalRule, family: &Family, grid: &[ParameterPoint], cfg: &McConfig) -> Result<ScanReport> {
    if grid.is_empty() {
        return Err(Error::Config("scan grid is empty".into()));
    }
    let per_point = grid
        .iter()
        .enumerate()
        .map(|(i, pt)| simulate_coverage(rule, family, pt, &cfg.with_seed(derive_seed(cfg.seed, i as u64))))
        .collect::<Result<Vec<_>>>()?;
    let (imin, best) = per_point
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.coverage_hat.total_cmp(&b.1.coverage_hat))
        .expect("nonempty");
    Ok(ScanReport {
        rule: rule.clone(),
        grid: grid.to_vec(),
        empirical_infimum: best.coverage_hat,
        argmin_point: grid[imin].clone(),
        per_point,
    })
}

/// Standardized-mean grid points `λ_i`.
pub fn lambda_grid(values: &[f64]) -> Vec<ParameterPoint> {
    values.iter().map(|&lambda| ParameterPoint::Standardized { lambda }).collect()
}

/// Two independent estimates of `P(χ'² ≤ q)` for a noncentral chi-square.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureCheck {
    pub df: u32,
    pub noncentrality: f64,
    pub quantile: f64,
    pub n: u64,
    /// From sums of squared shifted normals.
    pub direct: f64,
    /// From central `χ²_{df+2K}` with `K ~ Poisson(noncentrality/2)`.
    pub mixture: f64,
    pub combined_se: f64,
    /// `|direct - mixture| ≤ 4·combined_se`.
    pub agree: bool,
}

/// Cross-checks the Poisson-mixture representation of the noncentral
/// chi-square against direct sampling. The two estimators use
/// independent streams.
pub fn noncentral_chisq_mixture_check(df: u32, noncentrality: f64, quantile: f64, cfg: &McConfig) -> Result<MixtureCheck> {
    cfg.check()?;
    if df == 0 {
        return Err(Error::Domain("df must be at least 1".into()));
    }
    if !(noncentrality.is_finite() && noncentrality >= 0.0) {
        return Err(Error::Domain(format!("noncentrality must be finite and nonnegative, got {noncentrality}")));
    }
    let poisson_mean = 0.5 * noncentrality;
    if poisson_mean > 700.0 {
        return Err(Error::Domain("noncentrality too large for Poisson inversion".into()));
    }
    let shift = noncentrality.sqrt();
    let direct_hits = count_hits(cfg, |rng| {
        let first = std_normal(rng) + shift;
        let mut s = first * first;
        for _ in 1..df {
            let z = std_normal(rng);
            s += z * z;
        }
        s <= quantile
    });
    let p0 = (-poisson_mean).exp();
    let mixture_cfg = cfg.with_seed(derive_seed(cfg.seed, u64::MAX));
    let mixture_hits = count_hits(&mixture_cfg, |rng| {
        // Poisson by sequential inversion.
        let u = uniform(rng);
        let (mut k, mut pk, mut acc) = (0u32, p0, p0);
        while u > acc && pk > 0.0 {
            k += 1;
            pk *= poisson_mean / k as f64;
            acc += pk;
        }
        let total_df = df + 2 * k;
        let mut s = 0.0;
        for _ in 0..total_df {
            let z = std_normal(rng);
            s += z * z;
        }
        s <= quantile
    });
    let n = cfg.n as f64;
    let direct = direct_hits as f64 / n;
    let mixture = mixture_hits as f64 / n;
    let combined_se = ((direct * (1.0 - direct) + mixture * (1.0 - mixture)) / n).sqrt();
    Ok(MixtureCheck {
        df,
        noncentrality,
        quantile,
        n: cfg.n,
        direct,
        mixture,
        combined_se,
        agree: (direct - mixture).abs() <= 4.0 * combined_se,
    })
}

/// Monte Carlo probe of `P(X²/σ² ≥ c²)` along a grid of standardized means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlrProbe {
    pub c: f64,
    /// `P(Z² ≥ c²)`, the value at `λ = 0`.
    pub baseline: f64,
    pub scan: ScanReport,
    /// Every point is at least `baseline - 3·SE`.
    pub bound_ok: bool,
    /// Consecutive points (ordered by `|λ|`) never drop by more than three
    /// pooled standard errors.
    pub monotone_ok: bool,
}

/// Estimates `P(X²/σ² ≥ c²)` for `X ~ N(λσ, σ²)` on `lambda_grid` and checks
/// it stays above its `λ = 0` value and is nondecreasing in `|λ|` up to
/// Monte Carlo noise.
pub fn verify_mlr_inequality(c: f64, lambda_values: &[f64], cfg: &McConfig) -> Result<MlrProbe> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Domain(format!("c must be finite and positive, got {c}")));
    }
    let mut values: Vec<f64> = lambda_values.to_vec();
    values.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let baseline = 2.0 * phi(-c);
    let rule = IntervalRule {
        kind: RuleKind::SigmaNormal,
        c,
        alpha: 1.0 - baseline,
        family: Some("normal".into()),
        compact_bounds: None,
        dims: None,
    };
    let scan = scan_infimum(&rule, &Family::normal(), &lambda_grid(&values), cfg)?;
    let bound_ok = scan.per_point.iter().all(|r| r.meets_bound(baseline, 3.0));
    let monotone_ok = scan.per_point.windows(2).all(|w| {
        let (a, b) = (&w[0], &w[1]);
        let pooled = (a.hits + b.hits) as f64 / (a.n_reps + b.n_reps) as f64;
        let se = (pooled * (1.0 - pooled) * (1.0 / a.n_reps as f64 + 1.0 / b.n_reps as f64)).sqrt();
        b.coverage_hat >= a.coverage_hat - 3.0 * se
    });
    Ok(MlrProbe { c, baseline, scan, bound_ok, monotone_ok })
}

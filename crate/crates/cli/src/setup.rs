//! Turning flags into families, rules and parameter points.

use oneobs::calibrate::{
    calibrate_mean, calibrate_multivariate, CalibrationResult, calibrate_sigma_compact, calibrate_sigma_general, calibrate_sigma_normal,
};
use oneobs::distributions::{make_builtin_family, make_family_from_table, parse_table_csv, Family};
use oneobs::montecarlo::{analytic_infimum, CompactDist, CovarianceSpec, ParameterPoint};
use oneobs::{IntervalRule, RuleKind};

use crate::args::{CompactLaw, PointArgs, RuleArgs};
use crate::error::{CliError, CliResult};

/// `normal`, `cauchy` or `table:<path>`.
pub fn load_family(spec: &str) -> CliResult<Family> {
    match spec.strip_prefix("table:") {
        Some(path) => {
            let file = std::fs::File::open(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
            let rows = parse_table_csv(file)?;
            Ok(make_family_from_table(spec, &rows)?)
        }
        None => Ok(make_builtin_family(spec)?),
    }
}

fn need<T>(value: Option<T>, flag: &str, kind: RuleKind) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("--{flag} is required for {kind}")))
}

/// Calibrates the rule from `--alpha`, or wraps an explicit `--c` with the
/// alpha implied by its infimum coverage.
pub fn build_rule(args: &RuleArgs, family: &Family) -> CliResult<IntervalRule> {
    let kind = args.kind;
    match kind {
        RuleKind::SigmaCompact | RuleKind::MeanMultivariate if args.c.is_some() => {
            return Err(CliError::Usage(format!("{kind} derives c from --alpha; --c is not accepted")));
        }
        RuleKind::SigmaNormal if !family.is_normal() => {
            return Err(CliError::Usage("sigma-normal needs --family normal; use sigma-general".into()));
        }
        _ => {}
    }
    if let Some(c) = args.c {
        let mut rule = IntervalRule {
            kind,
            c,
            alpha: 0.5,
            family: Some(family.name().to_string()),
            compact_bounds: None,
            dims: None,
        };
        rule.validate()?;
        let inf = analytic_infimum(&rule, family)
            .ok_or_else(|| CliError::Usage(format!("no exact infimum for {kind} with this family; pass --alpha")))?;
        rule.alpha = 1.0 - inf;
        return Ok(rule);
    }
    let alpha = args
        .alpha
        .ok_or_else(|| CliError::Usage("one of --alpha or --c is required".into()))?;
    Ok(calibrate_rule(args, alpha, family)?.rule)
}

/// Calibrates `args.kind` at `alpha`.
pub fn calibrate_rule(args: &RuleArgs, alpha: f64, family: &Family) -> CliResult<CalibrationResult> {
    let kind = args.kind;
    if kind == RuleKind::SigmaNormal && !family.is_normal() {
        return Err(CliError::Usage("sigma-normal needs --family normal; use sigma-general".into()));
    }
    Ok(match kind {
        RuleKind::MeanAr | RuleKind::MeanStein => calibrate_mean(alpha, family, kind)?,
        RuleKind::SigmaNormal => calibrate_sigma_normal(alpha)?,
        RuleKind::SigmaGeneral => calibrate_sigma_general(alpha, family)?,
        RuleKind::SigmaCompact => calibrate_sigma_compact(alpha, need(args.a, "a", kind)?, need(args.b, "b", kind)?)?,
        RuleKind::MeanMultivariate => calibrate_multivariate(alpha, need(args.p, "p", kind)?, need(args.m, "m", kind)?)?,
    })
}

/// `identity`, `spread`, `rotated`, `scaled:<s>` or `diag:<d1,...,dp>`.
pub fn parse_covariance(spec: &str, p: usize, rotation_seed: u64) -> CliResult<CovarianceSpec> {
    let list = |s: &str| -> CliResult<Vec<f64>> {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad number {t:?} in --sigma"))))
            .collect()
    };
    Ok(match spec {
        "identity" => CovarianceSpec::Identity,
        "spread" => CovarianceSpec::spread_diagonal(p),
        "rotated" => {
            let CovarianceSpec::Diagonal { diag } = CovarianceSpec::spread_diagonal(p) else { unreachable!() };
            CovarianceSpec::rotated_diagonal(&diag, rotation_seed)
        }
        other => match other.split_once(':') {
            Some(("scaled", s)) => CovarianceSpec::ScaledIdentity {
                scale: s.trim().parse().map_err(|_| CliError::Usage(format!("bad scale in --sigma {other:?}")))?,
            },
            Some(("diag", s)) => CovarianceSpec::Diagonal { diag: list(s)? },
            _ => return Err(CliError::Usage(format!("unknown covariance {other:?}"))),
        },
    })
}

/// Mean vector of length `norm` along the first axis.
pub fn axis_mean(norm: f64, p: usize) -> Vec<f64> {
    let mut nu = vec![0.0; p];
    nu[0] = norm;
    nu
}

pub fn compact_law(point: &PointArgs, rule: &IntervalRule) -> CliResult<CompactDist> {
    let b = rule.compact_bounds.expect("sigma-compact rule has bounds");
    Ok(match point.dist {
        CompactLaw::Uniform => CompactDist::UniformMagnitude { lo: b.a, hi: b.b, p_positive: 0.5 },
        CompactLaw::FourPoint => {
            let probs = point.probs.clone().unwrap_or_else(|| vec![0.25; 4]);
            let probs: [f64; 4] = probs
                .try_into()
                .map_err(|_| CliError::Usage("--probs takes four probabilities".into()))?;
            CompactDist::four_point(b.a, b.b, probs)
        }
    })
}

/// The single point described by `--mu/--lambda/--sigma`, `--dist` or `--nu-norm`.
pub fn build_point(point: &PointArgs, rule: &IntervalRule) -> CliResult<ParameterPoint> {
    match rule.kind {
        RuleKind::SigmaCompact => Ok(ParameterPoint::Compact { dist: compact_law(point, rule)? }),
        RuleKind::MeanMultivariate => {
            let p = rule.dims.expect("multivariate rule has dims").p;
            let norm = point
                .nu_norm
                .ok_or_else(|| CliError::Usage("--nu-norm is required for mean-multivariate".into()))?;
            let sigma = parse_covariance(point.sigma.as_deref().unwrap_or("identity"), p, point.rotation_seed)?;
            Ok(ParameterPoint::Multivariate { nu: axis_mean(norm, p), sigma })
        }
        _ => {
            let sigma = match point.sigma.as_deref() {
                None => 1.0,
                Some(s) => s
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("--sigma must be a number for {}, got {s:?}", rule.kind)))?,
            };
            match (point.mu, point.lambda) {
                (Some(mu), _) => Ok(ParameterPoint::LocationScale { mu, sigma }),
                (None, Some(lambda)) if point.sigma.is_none() => Ok(ParameterPoint::Standardized { lambda }),
                (None, Some(lambda)) => Ok(ParameterPoint::LocationScale { mu: lambda * sigma, sigma }),
                (None, None) => Err(CliError::Usage("--mu or --lambda is required".into())),
            }
        }
    }
}

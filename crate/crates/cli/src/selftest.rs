//! Closed-form consistency checks.

use std::f64::consts::{PI, SQRT_2};

use oneobs::calibrate::{calibrate_mean, calibrate_sigma_general, calibrate_sigma_normal};
use oneobs::coverage::{coverage_mean_ar, coverage_mean_stein, critical_lambda_ar, critical_lambda_stein, psi, theta_root};
use oneobs::distributions::{std_normal_cdf, std_normal_quantile, Family};
use oneobs::RuleKind;
use serde::{Deserialize, Serialize};

use crate::args::SelftestArgs;
use crate::error::{CliError, CliResult};
use crate::output::{emit, num};
use crate::setup::load_family;

const C_GRID: [f64; 6] = [1.2, 1.5, 2.0, 3.0, 5.0, 10.0];
const ALPHAS: [f64; 3] = [0.01, 0.05, 0.5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub name: String,
    pub description: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub items: Vec<Item>,
    pub passed: bool,
}

type Probe = oneobs::Result<f64>;

fn item(name: &str, description: &str, tolerance: f64, errors: impl IntoIterator<Item = Probe>) -> Item {
    let mut max_error = 0.0f64;
    for e in errors {
        match e {
            Ok(v) if v.is_finite() => max_error = max_error.max(v.abs()),
            // Evaluation failed; keep the report serializable as plain JSON.
            _ => max_error = f64::MAX,
        }
    }
    Item {
        name: name.into(),
        description: description.into(),
        max_error,
        tolerance,
        passed: max_error <= tolerance,
    }
}

/// Central difference with step `h`.
fn slope(f: impl Fn(f64) -> Probe, x: f64, h: f64) -> Probe {
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

pub fn closed_form_items() -> Vec<Item> {
    let cauchy = Family::cauchy();
    let normal = Family::normal();
    vec![
        item(
            "cauchy-theta",
            "Cauchy root theta(c) equals sqrt(c^2 - 1)/c",
            1e-8,
            [1.1, 1.41421, 2.0, 5.0, 50.0]
                .map(|c: f64| Ok(theta_root(&cauchy, c)?.theta - (c * c - 1.0).sqrt() / c)),
        ),
        item(
            "cauchy-psi",
            "Cauchy infimum coverage at c = sqrt(2) is 3/4; tends to 1/2 as c -> 1",
            1e-8,
            [
                psi(&cauchy, SQRT_2).map(|v| v - 0.75),
                psi(&cauchy, 1.0001).map(|v| if (v - 0.5).abs() < 0.01 { 0.0 } else { 1.0 }),
                psi(&cauchy, 1e4).map(|v| if v > 0.999 { 0.0 } else { 1.0 }),
            ],
        ),
        item(
            "ar-stationarity",
            "d/dlambda of the X +- c|X| coverage vanishes at its critical lambda",
            1e-6,
            C_GRID.map(|c| slope(|l| coverage_mean_ar(l, c), critical_lambda_ar(c)?, 1e-5)),
        ),
        item(
            "stein-stationarity",
            "d/dlambda of the (-c|X|, c|X|) coverage vanishes at its critical lambda",
            1e-6,
            C_GRID.map(|c| slope(|l| coverage_mean_stein(l, c), critical_lambda_stein(c)?, 1e-5)),
        ),
        item(
            "minimal-coverage-equality",
            "both normal mean intervals have the same minimal coverage",
            1e-10,
            C_GRID.map(|c| {
                Ok(coverage_mean_ar(critical_lambda_ar(c)?, c)? - coverage_mean_stein(critical_lambda_stein(c)?, c)?)
            }),
        ),
        item(
            "psi-normal",
            "general infimum coverage on the normal family matches the closed-form minimum",
            1e-9,
            C_GRID.map(|c| Ok(psi(&normal, c)? - coverage_mean_ar(critical_lambda_ar(c)?, c)?)),
        ),
        item(
            "sigma-normal-consistency",
            "general sigma rule on the normal family equals the normal rule and Phi^-1((1 + alpha)/2)",
            1e-8,
            ALPHAS.iter().flat_map(|&a| {
                let general = calibrate_sigma_general(a, &normal).map(|r| r.rule.c);
                [
                    general.clone().and_then(|g| Ok(g - std_normal_quantile((1.0 + a) / 2.0)?)),
                    general.and_then(|g| Ok(g - calibrate_sigma_normal(a)?.rule.c)),
                ]
            }),
        ),
        item(
            "sigma-cauchy",
            "general sigma rule on the Cauchy family equals tan(pi alpha / 2)",
            1e-8,
            ALPHAS.map(|a| Ok(calibrate_sigma_general(a, &cauchy)?.rule.c - (PI * a / 2.0).tan())),
        ),
        item(
            "cauchy-mean-calibration",
            "calibrated Cauchy mean constant equals 1/sin(pi alpha)",
            1e-7,
            [0.1, 0.25, 0.4].map(|a: f64| {
                let c = calibrate_mean(a, &cauchy, RuleKind::MeanAr)?.rule.c;
                Ok((c - 1.0 / (PI * a).sin()) / c)
            }),
        ),
    ]
}

/// Compares a tabulated family with the normal closed form.
pub fn table_item(family: &Family) -> Item {
    let normal = Family::normal();
    let cdf_errors = (0..=40).map(|i| {
        let x = -4.0 + 0.2 * i as f64;
        Ok(family.cdf(x) - std_normal_cdf(x)?)
    });
    let psi_errors = [1.5, 2.0, 4.0].map(|c| Ok(psi(family, c)? - psi(&normal, c)?));
    item(
        "table-vs-normal",
        "tabulated family agrees with the normal closed form (CDF and infimum coverage)",
        1e-5,
        cdf_errors.chain(psi_errors),
    )
}

pub fn selftest(args: &SelftestArgs) -> CliResult<()> {
    let mut items = closed_form_items();
    if let Some(spec) = &args.family {
        if !spec.starts_with("table:") {
            return Err(CliError::Usage("--family for selftest takes table:<path>".into()));
        }
        let family = load_family(spec)?;
        items.push(table_item(&family));
    }
    let passed = items.iter().all(|i| i.passed);
    let report = SelftestReport { items, passed };
    for i in &report.items {
        eprintln!("{} {}: max error {:.3e} (tolerance {:.0e})", if i.passed { "PASS" } else { "FAIL" }, i.name, i.max_error, i.tolerance);
    }
    emit(&args.out, &report, |w| {
        w.write_record(["item", "passed", "max_error", "tolerance"])?;
        for i in &report.items {
            w.write_record([i.name.clone(), i.passed.to_string(), num(i.max_error), num(i.tolerance)])?;
        }
        Ok(())
    })?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(report.items.iter().filter(|i| !i.passed).count()))
    }
}

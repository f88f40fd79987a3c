use oneobs::calibrate::{bonferroni_joint, CalibrationResult};
use oneobs::coverage::coverage_curve;

use crate::args::{CalibrateArgs, CurveArgs, RuleArgs};
use crate::error::{CliError, CliResult};
use crate::output::{emit, num, opt, CsvWriter};
use crate::setup::{build_rule, calibrate_rule, load_family};

const CALIBRATION_HEADER: [&str; 9] =
    ["kind", "alpha", "c", "achieved_inf_coverage", "residual", "iterations", "bound_based", "refined_c", "family"];

fn calibration_row(w: &mut CsvWriter<'_>, r: &CalibrationResult) -> csv::Result<()> {
    w.write_record([
        r.rule.kind.to_string(),
        num(r.rule.alpha),
        num(r.rule.c),
        num(r.achieved_inf_coverage),
        num(r.residual),
        r.iterations.to_string(),
        r.bound_based.to_string(),
        opt(r.refined_c),
        r.rule.family.clone().unwrap_or_default(),
    ])
}

pub fn calibrate(args: &CalibrateArgs) -> CliResult<()> {
    let family = load_family(&args.family.family)?;
    if args.kind == "joint" {
        let joint = bonferroni_joint(args.alpha, args.split, &family)?;
        return emit(&args.out, &joint, |w| {
            w.write_record(CALIBRATION_HEADER)?;
            calibration_row(w, &joint.mean)?;
            calibration_row(w, &joint.sigma)
        });
    }
    let kind = args.kind.parse().map_err(|e: oneobs::Error| CliError::Usage(e.to_string()))?;
    let rule_args = RuleArgs {
        kind,
        alpha: Some(args.alpha),
        c: None,
        family: args.family.clone(),
        a: args.a,
        b: args.b,
        p: args.p,
        m: args.m,
    };
    let result = calibrate_rule(&rule_args, args.alpha, &family)?;
    emit(&args.out, &result, |w| {
        w.write_record(CALIBRATION_HEADER)?;
        calibration_row(w, &result)
    })
}

pub fn curve(args: &CurveArgs) -> CliResult<()> {
    let family = load_family(&args.rule.family.family)?;
    let rule = build_rule(&args.rule, &family)?;
    let curve = coverage_curve(&family, rule.kind, rule.c, &args.grid.points())?;
    emit(&args.out, &curve, |w| {
        w.write_record(["lambda", "coverage"])?;
        for p in &curve.points {
            w.write_record([num(p.lambda), num(p.coverage)])?;
        }
        Ok(())
    })
}

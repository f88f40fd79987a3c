mod common;

use std::f64::consts::{E, PI, SQRT_2};

use oneobs::calibrate::{
    bonferroni_joint, calibrate_mean, calibrate_multivariate, calibrate_sigma_compact, calibrate_sigma_general,
    calibrate_sigma_normal, multivariate_a,
};
use oneobs::coverage::psi;
use oneobs::distributions::{make_family_from_table, Family};
use oneobs::{Error, RuleKind};

#[test]
fn mean_examples() {
    let cauchy = Family::cauchy();
    let r = calibrate_mean(0.25, &cauchy, RuleKind::MeanAr).unwrap();
    assert!((r.rule.c - SQRT_2).abs() < 1e-6);
    assert!((r.achieved_inf_coverage - 0.75).abs() < 1e-8);
    assert!(!r.bound_based);
    let s = calibrate_mean(0.2421, &Family::normal(), RuleKind::MeanStein).unwrap();
    assert!((s.rule.c - 2.0).abs() < 1e-3);
    assert_eq!(s.rule.kind, RuleKind::MeanStein);
    let ar = calibrate_mean(0.2421, &Family::normal(), RuleKind::MeanAr).unwrap();
    assert!((ar.rule.c - s.rule.c).abs() < 1e-8);
    assert!(matches!(
        calibrate_mean(0.6, &Family::normal(), RuleKind::MeanAr),
        Err(Error::Unattainable { .. })
    ));
    assert!(matches!(calibrate_mean(0.1, &cauchy, RuleKind::SigmaNormal), Err(Error::Config(_))));
}

#[test]
fn cauchy_mean_constant_closed_form() {
    // ψ(c) = 1/2 + (2/π) arctan √((c-1)/(c+1)) = 1 - α  ⇔  c = 1/sin(πα).
    for a in [0.01, 0.05, 0.1, 0.3, 0.45] {
        let c = calibrate_mean(a, &Family::cauchy(), RuleKind::MeanAr).unwrap().rule.c;
        assert!((c - 1.0 / (PI * a).sin()).abs() < 1e-7 * c, "alpha = {a}");
    }
}

#[test]
fn mean_self_consistency_and_monotonicity() {
    for fam in [Family::normal(), Family::cauchy()] {
        let mut prev = f64::INFINITY;
        for i in 1..=24 {
            let a = i as f64 * 0.02;
            let r = calibrate_mean(a, &fam, RuleKind::MeanAr).unwrap();
            assert!((psi(&fam, r.rule.c).unwrap() - (1.0 - a)).abs() <= 1e-8);
            assert!((r.achieved_inf_coverage - (1.0 - a)).abs() <= 1e-8);
            assert!(r.rule.c < prev);
            prev = r.rule.c;
        }
    }
}

#[test]
fn sigma_normal_examples() {
    assert!((calibrate_sigma_normal(0.05).unwrap().rule.c - 0.06271).abs() < 1e-5);
    assert!((calibrate_sigma_normal(0.1).unwrap().rule.c - 0.12566).abs() < 1e-5);
    for a in [0.01, 0.05, 0.1, 0.5] {
        let n = calibrate_sigma_normal(a).unwrap();
        let g = calibrate_sigma_general(a, &Family::normal()).unwrap();
        assert!((n.rule.c - g.rule.c).abs() < 1e-8);
        assert!((common::phi(n.rule.c) - 0.5 - a / 2.0).abs() < 1e-12);
        assert!((n.achieved_inf_coverage - (1.0 - a)).abs() < 1e-8);
    }
    assert!(matches!(calibrate_sigma_normal(1.0), Err(Error::Domain(_))));
}

#[test]
fn sigma_general_cauchy() {
    for a in [0.05, 0.25, 0.5, 0.9] {
        let r = calibrate_sigma_general(a, &Family::cauchy()).unwrap();
        assert!((r.rule.c - (PI * a / 2.0).tan()).abs() < 1e-8);
        assert!((common::cauchy_cdf(r.rule.c) - 0.5 - a / 2.0).abs() < 1e-10);
    }
    assert!((calibrate_sigma_general(0.05, &Family::cauchy()).unwrap().rule.c - 0.07870).abs() < 1e-5);
    assert!((calibrate_sigma_general(0.25, &Family::cauchy()).unwrap().rule.c - (PI / 8.0).tan()).abs() < 1e-10);
}

#[test]
fn sigma_general_needs_unimodality() {
    let mut rows: Vec<(f64, f64)> = (0..=7).map(|i| (i as f64 / 7.0, 0.5)).collect();
    rows.push((1.0001, 0.0));
    let flat = make_family_from_table("flat", &rows).unwrap();
    assert!(matches!(calibrate_sigma_general(0.1, &flat), Err(Error::Assumption(_))));
}

#[test]
fn compact_examples() {
    let r = calibrate_sigma_compact(0.19, 1.0, 1.0).unwrap();
    assert!((r.rule.c - 0.1f64.sqrt()).abs() < 1e-12);
    assert!(r.bound_based && r.achieved_inf_coverage >= 0.81 - 1e-12);
    let r = calibrate_sigma_compact(0.5, 1.0, 2.0).unwrap();
    assert!((r.rule.c.powi(2) - (1.0 - 0.5f64.sqrt() / 0.8)).abs() < 1e-12);
    assert!((r.rule.c.powi(2) - 0.11612).abs() < 1e-5);
    match calibrate_sigma_compact(0.3, 1.0, 2.0) {
        Err(Error::InfeasibleAlpha { alpha, min_alpha }) => {
            assert_eq!(alpha, 0.3);
            assert!((min_alpha - 0.36).abs() < 1e-12);
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(calibrate_sigma_compact(0.5, 2.0, 1.0), Err(Error::Domain(_))));
}

#[test]
fn compact_feasibility_boundary() {
    for (a, b) in [(1.0f64, 1.5f64), (1.0, 2.0), (2.0, 7.0)] {
        let k2: f64 = 4.0 / (b / a + a / b).powi(2);
        let alpha = 1.0 - k2 + 1e-9;
        let r = calibrate_sigma_compact(alpha, a, b).unwrap();
        let c2 = r.rule.c * r.rule.c;
        assert!(c2 >= 0.0 && c2.is_finite());
        let naive = 1.0 - (1.0 - alpha).sqrt() / k2.sqrt();
        assert!((c2 - naive).abs() < 1e-12, "{c2} vs {naive}");
    }
}

#[test]
fn multivariate_examples() {
    let r = calibrate_multivariate(0.05, 2, 1).unwrap();
    assert!((r.rule.c - 3.85 / 0.05f64.sqrt()).abs() < 1e-12);
    assert!((r.rule.c - 17.218).abs() < 1e-3);
    assert!((multivariate_a(2) - 1.000_086).abs() < 1e-6);
    assert!((r.refined_c.unwrap() - 17.19).abs() < 5e-3);
    let r = calibrate_multivariate(0.99, 4, 4).unwrap();
    assert!((r.rule.c - 3.852).abs() < 1e-3);
    assert!(calibrate_multivariate(0.1, 0, 1).is_err());
}

#[test]
fn headline_dominates_refined() {
    for p in 1..=12 {
        for m in 1..=6 {
            for a in [0.01, 0.05, 0.1, 0.5, 0.9] {
                let r = calibrate_multivariate(a, p, m).unwrap();
                let refined = E * (2.0 * multivariate_a(p)).sqrt() * a.powf(-1.0 / (p * m) as f64);
                assert!((r.refined_c.unwrap() - refined).abs() < 1e-12 * refined);
                assert!(r.rule.c >= refined, "p = {p}, m = {m}, alpha = {a}");
            }
        }
    }
}

#[test]
fn bonferroni_examples() {
    let j = bonferroni_joint(0.1, 0.5, &Family::normal()).unwrap();
    assert!((j.mean.rule.alpha - 0.05).abs() < 1e-15 && (j.sigma.rule.alpha - 0.05).abs() < 1e-15);
    assert_eq!(j.sigma.rule.kind, RuleKind::SigmaNormal);
    let j = bonferroni_joint(0.4, 0.5, &Family::cauchy()).unwrap();
    assert!((j.mean.rule.c - 1.0 / (0.2 * PI).sin()).abs() < 1e-6);
    assert_eq!(j.sigma.rule.kind, RuleKind::SigmaGeneral);
    let j = bonferroni_joint(0.1, 0.99, &Family::normal()).unwrap();
    assert!((j.mean.rule.alpha - 0.099).abs() < 1e-12 && (j.sigma.rule.alpha - 0.001).abs() < 1e-12);
    assert!(bonferroni_joint(0.1, 1.0, &Family::normal()).is_err());
}

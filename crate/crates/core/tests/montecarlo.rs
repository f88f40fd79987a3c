mod common;

use oneobs::calibrate::{calibrate_mean, calibrate_multivariate, calibrate_sigma_compact, calibrate_sigma_general, calibrate_sigma_normal};
use oneobs::distributions::Family;
use oneobs::montecarlo::{
    analytic_coverage, derive_seed, lambda_grid, noncentral_chisq_mixture_check, scan_infimum, simulate_compact,
    simulate_coverage, simulate_multivariate, verify_mlr_inequality, CompactDist, CovarianceSpec, McConfig,
    ParameterPoint,
};
use oneobs::{Error, IntervalRule, RuleKind};

fn stein(c: f64) -> IntervalRule {
    IntervalRule { kind: RuleKind::MeanStein, c, alpha: 0.25, family: Some("normal".into()), compact_bounds: None, dims: None }
}

/// Regularized lower incomplete gamma `P(s, x)` by its power series.
fn gamma_p(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut term = 1.0 / s;
    let mut sum = term;
    let mut k = 1.0;
    while term > 1e-17 * sum {
        term *= x / (s + k);
        sum += term;
        k += 1.0;
    }
    let ln_gamma_s1 = ln_gamma(s + 1.0);
    (s * x.ln() - x - ln_gamma_s1 + (s * sum).ln()).exp()
}

/// Lanczos approximation (g = 7, n = 9).
fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let x = x - 1.0;
    let mut a = G[0];
    let t = x + 7.5;
    for (i, g) in G.iter().enumerate().skip(1) {
        a += g / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// `P(χ'²_df(nc) ≤ q)` as a Poisson-weighted sum of central CDFs.
fn ncx2_cdf(df: f64, nc: f64, q: f64) -> f64 {
    let lam = nc / 2.0;
    let mut w = (-lam).exp();
    let mut total = 0.0;
    for k in 0..400 {
        if k > 0 {
            w *= lam / k as f64;
        }
        total += w * gamma_p(df / 2.0 + k as f64, q / 2.0);
    }
    total
}

#[test]
fn gamma_oracle_sanity() {
    // χ²_2 CDF is 1 - e^{-x/2}.
    assert!((gamma_p(1.0, 1.5) - (1.0 - (-1.5f64).exp())).abs() < 1e-14);
    assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-12);
}

#[test]
fn stein_examples() {
    let fam = Family::normal();
    let r = simulate_coverage(&stein(2.0), &fam, &ParameterPoint::Standardized { lambda: 0.0 }, &McConfig::new(100_000, 1)).unwrap();
    assert_eq!(r.coverage_hat, 1.0);
    let r = simulate_coverage(&stein(2.0), &fam, &ParameterPoint::Standardized { lambda: 1.0481 }, &McConfig::new(10_000_000, 2)).unwrap();
    assert!(r.agrees_with(common::p2(1.0481, 2.0), 3.0), "{}", r.coverage_hat);
    assert!((r.std_error - (r.coverage_hat * (1.0 - r.coverage_hat) / 1e7).sqrt()).abs() < 1e-18);
}

#[test]
fn sigma_normal_at_zero() {
    let rule = calibrate_sigma_normal(0.1).unwrap().rule;
    let pt = ParameterPoint::LocationScale { mu: 0.0, sigma: 1.0 };
    let r = simulate_coverage(&rule, &Family::normal(), &pt, &McConfig::new(10_000_000, 3)).unwrap();
    assert!(r.agrees_with(0.9, 3.0));
}

#[test]
fn mean_ar_agrees_with_exact_coverage() {
    for fam in [Family::normal(), Family::cauchy()] {
        let rule = calibrate_mean(0.2, &fam, RuleKind::MeanAr).unwrap().rule;
        for (i, lambda) in [0.0, 0.5, 1.0, 3.0].into_iter().enumerate() {
            let pt = ParameterPoint::Standardized { lambda };
            let r = simulate_coverage(&rule, &fam, &pt, &McConfig::new(1_000_000, 40 + i as u64)).unwrap();
            let exact = analytic_coverage(&rule, &fam, &pt).unwrap();
            assert!(r.agrees_with(exact, 4.0) || r.std_error == 0.0, "{} {lambda}", fam.name());
        }
    }
}

#[test]
fn stein_on_cauchy_uses_general_formula() {
    let fam = Family::cauchy();
    let rule = calibrate_mean(0.25, &fam, RuleKind::MeanStein).unwrap().rule;
    assert!((rule.c - std::f64::consts::SQRT_2).abs() < 1e-6);
    let pt = ParameterPoint::Standardized { lambda: 1.4 };
    let exact = analytic_coverage(&rule, &fam, &pt).unwrap();
    let r = simulate_coverage(&rule, &fam, &pt, &McConfig::new(1_000_000, 5)).unwrap();
    assert!(r.agrees_with(exact, 4.0));
    // θ* = c²λ*/(c² - 1) with λ* = 1/√2 gives the minimal coverage 3/4.
    let worst = ParameterPoint::Standardized { lambda: 2.0 / 2f64.sqrt() };
    assert!((analytic_coverage(&rule, &fam, &worst).unwrap() - 0.75).abs() < 1e-6);
}

#[test]
fn scan_examples() {
    let fam = Family::normal();
    let rule = IntervalRule { kind: RuleKind::MeanAr, c: 2.0, alpha: 0.25, family: Some("normal".into()), compact_bounds: None, dims: None };
    let grid = lambda_grid(&(0..=80).map(|i| i as f64 * 0.05).collect::<Vec<_>>());
    let s = scan_infimum(&rule, &fam, &grid, &McConfig::new(1_000_000, 11)).unwrap();
    let argmin = s.argmin_point.lambda().unwrap();
    assert!((argmin - 0.7861).abs() <= 0.1, "argmin {argmin}");
    let min = s.per_point.iter().map(|r| r.coverage_hat).fold(f64::INFINITY, f64::min);
    assert_eq!(min, s.empirical_infimum);
    for (i, r) in s.per_point.iter().enumerate() {
        assert_eq!(r.seed, derive_seed(11, i as u64));
    }

    let cauchy = Family::cauchy();
    let rule = calibrate_mean(0.25, &cauchy, RuleKind::MeanAr).unwrap().rule;
    let grid = lambda_grid(&(0..=60).map(|i| i as f64 * 0.05).collect::<Vec<_>>());
    let s = scan_infimum(&rule, &cauchy, &grid, &McConfig::new(1_000_000, 12)).unwrap();
    assert!((s.empirical_infimum - 0.75).abs() <= 3.0 * s.argmin_report().std_error);
    assert!((s.argmin_point.lambda().unwrap() - 0.7071).abs() <= 0.25);

    let rule = calibrate_sigma_general(0.5, &cauchy).unwrap().rule;
    let grid = lambda_grid(&(0..=20).map(|i| i as f64 * 0.25).collect::<Vec<_>>());
    let s = scan_infimum(&rule, &cauchy, &grid, &McConfig::new(200_000, 13)).unwrap();
    assert_eq!(s.argmin_point, ParameterPoint::Standardized { lambda: 0.0 });

    assert!(matches!(scan_infimum(&rule, &cauchy, &[], &McConfig::new(10, 1)), Err(Error::Config(_))));
}

#[test]
fn compact_examples() {
    let rule = calibrate_sigma_compact(0.19, 1.0, 1.0).unwrap().rule;
    let dist = CompactDist::Discrete { points: vec![(1.0, 0.5), (-1.0, 0.5)] };
    assert_eq!(simulate_compact(&rule, &dist, &McConfig::new(100_000, 1)).unwrap().coverage_hat, 1.0);

    let rule = calibrate_sigma_compact(0.5, 1.0, 2.0).unwrap().rule;
    let c2 = rule.c * rule.c;
    let probs = [0.2, 0.3, 0.1, 0.4];
    let four = CompactDist::four_point(1.0, 2.0, probs);
    // Enumerate the four atoms.
    let values = [1.0, -1.0, 2.0, -2.0];
    let mean: f64 = values.iter().zip(probs).map(|(x, p)| x * p).sum();
    let var: f64 = values.iter().zip(probs).map(|(x, p)| p * (x - mean) * (x - mean)).sum();
    let exact: f64 = values.iter().zip(probs).filter(|(x, _)| c2 * var <= *x * *x).map(|(_, p)| p).sum();
    assert!(exact >= 0.5);
    let r = simulate_compact(&rule, &four, &McConfig::new(1_000_000, 2)).unwrap();
    assert!(r.meets_bound(0.5, 3.0));
    assert!((r.coverage_hat - exact).abs() <= 4.0 * r.std_error.max(1e-3));

    let uni = CompactDist::UniformMagnitude { lo: 1.0, hi: 2.0, p_positive: 0.5 };
    let var = common::simpson(|x| x * x, 1.0, 2.0, 200);
    let exact = common::simpson(|x| if x * x >= c2 * var { 1.0 } else { 0.0 }, 1.0, 2.0, 20_000);
    assert!(exact >= 0.5);
    let r = simulate_compact(&rule, &uni, &McConfig::new(1_000_000, 3)).unwrap();
    assert!(r.meets_bound(0.5, 3.0));
    assert!((r.coverage_hat - exact).abs() <= 4.0 * r.std_error.max(1e-3));

    let outside = CompactDist::four_point(0.5, 2.0, [0.25; 4]);
    assert!(matches!(simulate_compact(&rule, &outside, &McConfig::new(10, 1)), Err(Error::Config(_))));
}

/// Exact multivariate coverage under `Σ = I`: `P(S ≥ m‖ν‖²/c²)` with
/// `S ~ χ'²_{pm}(m‖ν‖²)`.
fn multivariate_exact(c: f64, p: usize, m: usize, norm: f64) -> f64 {
    let nc = m as f64 * norm * norm;
    1.0 - ncx2_cdf((p * m) as f64, nc, nc / (c * c))
}

#[test]
fn multivariate_examples() {
    let cfg = McConfig::new(1_000_000, 21);
    let r = simulate_multivariate(0.1, 3, 2, &[0.0; 3], &CovarianceSpec::Identity, &cfg).unwrap();
    assert_eq!(r.coverage_hat, 1.0);
    let c = calibrate_multivariate(0.1, 3, 2).unwrap().rule.c;
    for (i, norm) in [0.1, 1.0, 10.0, 100.0].into_iter().enumerate() {
        let nu = [norm, 0.0, 0.0];
        let r = simulate_multivariate(0.1, 3, 2, &nu, &CovarianceSpec::Identity, &cfg.with_seed(100 + i as u64)).unwrap();
        assert!(r.meets_bound(0.9, 3.0));
        let exact = multivariate_exact(c, 3, 2, norm);
        assert!(exact >= 0.9);
        assert!((r.coverage_hat - exact).abs() <= 4.0 * r.std_error.max(1e-3 / 4.0), "{norm}: {} vs {exact}", r.coverage_hat);
    }
    let diag = CovarianceSpec::Diagonal { diag: vec![1.0, 10.0, 100.0] };
    let r = simulate_multivariate(0.1, 3, 2, &[5.0, 5.0, 5.0], &diag, &cfg).unwrap();
    assert!(r.meets_bound(0.9, 3.0));
    let bad = CovarianceSpec::Dense { rows: vec![vec![1.0, 0.0, 0.0], vec![0.0, -1.0, 0.0], vec![0.0, 0.0, 1.0]] };
    assert!(matches!(simulate_multivariate(0.1, 3, 2, &[1.0, 0.0, 0.0], &bad, &cfg), Err(Error::Config(_))));
}

#[test]
fn mixture_examples() {
    let cfg = McConfig::new(1_000_000, 31);
    let chk = noncentral_chisq_mixture_check(3, 0.0, 7.81, &cfg).unwrap();
    let exact = gamma_p(1.5, 7.81 / 2.0);
    assert!((exact - 0.95).abs() < 1e-3);
    assert!((chk.direct - exact).abs() < 4.0 * (exact * (1.0 - exact) / 1e6).sqrt());
    assert!((chk.mixture - exact).abs() < 4.0 * (exact * (1.0 - exact) / 1e6).sqrt());
    let chk = noncentral_chisq_mixture_check(2, 4.0, 1e6, &McConfig::new(100_000, 32)).unwrap();
    assert_eq!((chk.direct, chk.mixture), (1.0, 1.0));
    let chk = noncentral_chisq_mixture_check(5, 2.5, 5.0, &cfg).unwrap();
    assert!(chk.agree);
    let exact = ncx2_cdf(5.0, 2.5, 5.0);
    assert!((chk.direct - exact).abs() < 4.0 * (exact * (1.0 - exact) / 1e6).sqrt());
    assert!(noncentral_chisq_mixture_check(0, 1.0, 1.0, &cfg).is_err());
}

#[test]
fn mlr_probe_examples() {
    let cfg = McConfig::new(1_000_000, 41);
    let p = verify_mlr_inequality(1.96, &[0.0], &cfg).unwrap();
    assert!((p.scan.per_point[0].coverage_hat - 0.05).abs() < 4.0 * p.scan.per_point[0].std_error);
    let p = verify_mlr_inequality(1.96, &[3.0], &cfg).unwrap();
    let exact = common::phi(-1.96 - 3.0) + 1.0 - common::phi(1.96 - 3.0);
    assert!(p.scan.per_point[0].coverage_hat > 0.5);
    assert!((p.scan.per_point[0].coverage_hat - exact).abs() < 4.0 * p.scan.per_point[0].std_error);

    let c = calibrate_sigma_normal(0.05).unwrap().rule.c;
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
    let p = verify_mlr_inequality(c, &grid, &cfg).unwrap();
    assert!(p.bound_ok && p.monotone_ok);
    assert_eq!(p.scan.argmin_point, ParameterPoint::Standardized { lambda: 0.0 });
    assert!((p.baseline - 0.95).abs() < 1e-9);
}

#[test]
fn reproducibility_and_partitioning() {
    let rule = calibrate_sigma_normal(0.3).unwrap().rule;
    let pt = ParameterPoint::Standardized { lambda: 0.7 };
    let fam = Family::normal();
    let cfg = McConfig::new(123_457, 77).with_partitions(7);
    let a = simulate_coverage(&rule, &fam, &pt, &cfg).unwrap();
    let b = simulate_coverage(&rule, &fam, &pt, &cfg).unwrap();
    assert_eq!((a.hits, a.coverage_hat), (b.hits, b.coverage_hat));
    let other = simulate_coverage(&rule, &fam, &pt, &cfg.with_seed(78)).unwrap();
    assert_ne!(a.hits, other.hits);
    assert!(matches!(simulate_coverage(&rule, &fam, &pt, &McConfig::new(0, 1)), Err(Error::Config(_))));
}

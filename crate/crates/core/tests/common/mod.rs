//! Reference implementations that share no code with the library.
#![allow(dead_code)]

use std::f64::consts::PI;

/// `erf(x)` from `2/√π · e^{-x²} · Σ 2ⁿ x^{2n+1} / (1·3···(2n+1))`; every term is positive.
pub fn erf(x: f64) -> f64 {
    let ax = x.abs();
    let mut term = ax;
    let mut sum = ax;
    let mut n = 0.0;
    while term > 1e-18 * sum {
        n += 1.0;
        term *= 2.0 * ax * ax / (2.0 * n + 1.0);
        sum += term;
    }
    let v = 2.0 / PI.sqrt() * (-ax * ax).exp() * sum;
    v.min(1.0).copysign(x)
}

/// Φ by the series above; accurate to roughly 1e-15 for |x| ≤ 6.
pub fn phi(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

pub fn cauchy_cdf(x: f64) -> f64 {
    0.5 + x.atan() / PI
}

/// Composite Simpson with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Golden-section minimizer of a unimodal `f` on `[a, b]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > 1e-12 * (1.0 + a.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// The two normal mean coverages written out directly.
pub fn p1(l: f64, c: f64) -> f64 {
    phi(c / (c + 1.0) * l) + 1.0 - phi(c / (c - 1.0) * l)
}

pub fn p2(l: f64, c: f64) -> f64 {
    phi((c - 1.0) / c * l) + 1.0 - phi((c + 1.0) / c * l)
}

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Rows of `z,f0` sampling the standard normal density on `[0, 8]`.
pub fn normal_table_csv(step: f64) -> String {
    let mut s = String::from("z,f0\n");
    let n = (8.0 / step).round() as usize;
    for i in 0..=n {
        let z = i as f64 * step;
        s.push_str(&format!("{z},{}\n", normal_pdf(z)));
    }
    s
}

//! Bracketed root finding: bisection accelerated by secant steps.

use crate::error::{Error, Result};

/// Stopping rules for [`bracketed_root`].
#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Stop once `|f(x)| <= f_tol`.
    pub f_tol: f64,
    /// Stop once the bracket width is `<= x_rtol * (1 + |x|)`.
    pub x_rtol: f64,
    pub max_iter: u32,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { f_tol: 1e-12, x_rtol: 1e-14, max_iter: 500 }
    }
}

/// A root together with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: u32,
    /// Final bracket; always contains `x`.
    pub bracket: (f64, f64),
}

/// Finds a zero of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` must not
/// share a strict sign.
///
/// Each step takes the secant point of the current bracket unless the
/// previous step failed to halve the bracket, in which case it bisects.
/// The bracket therefore shrinks at least geometrically.
pub fn bracketed_root<F>(mut f: F, lo: f64, hi: f64, opts: RootOptions) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    if !(lo < hi) {
        return Err(Error::Domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Domain(format!("function is NaN at bracket endpoints [{a}, {b}]")));
    }
    if fa == 0.0 {
        return Ok(Root { x: a, residual: 0.0, iterations: 0, bracket: (a, b) });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, residual: 0.0, iterations: 0, bracket: (a, b) });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootNotFound(format!(
            "no sign change on [{a}, {b}]: f(a) = {fa}, f(b) = {fb}"
        )));
    }

    let mut bisect = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let width = b - a;
        let mid = a + 0.5 * width;
        let x = if bisect || !fa.is_finite() || !fb.is_finite() {
            mid
        } else {
            let s = b - fb * (b - a) / (fb - fa);
            if s > a && s < b { s } else { mid }
        };
        let fx = f(x);
        if fx.is_nan() {
            return Err(Error::Domain(format!("function is NaN at {x}")));
        }
        if fx.abs() <= opts.f_tol {
            return Ok(Root { x, residual: fx, iterations, bracket: (a, b) });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        let (best, fbest) = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
        if b - a <= opts.x_rtol * (1.0 + best.abs()) {
            return Ok(Root { x: best, residual: fbest, iterations, bracket: (a, b) });
        }
        bisect = b - a > 0.5 * width;
    }
    let (best, fbest) = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
    Ok(Root { x: best, residual: fbest, iterations, bracket: (a, b) })
}

//! Densities supplied as a table of `(z, f0(z))` samples on `z >= 0`.
//!
//! The table is interpolated with a monotone piecewise cubic (Fritsch-Carlson
//! slopes), extended symmetrically to `z < 0`, and normalized so the
//! extended density integrates to one.

use std::io::Read;

use crate::error::{Error, Result};
use crate::numeric::adaptive_simpson;

pub(crate) const MIN_ROWS: usize = 8;
const MASS_SLACK: f64 = 0.10;
const CUMULATIVE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Tabulated {
    z: Vec<f64>,
    f: Vec<f64>,
    slopes: Vec<f64>,
    /// Normalized mass of `[0, z[i]]`.
    cumulative: Vec<f64>,
    /// Reciprocal of the raw total mass over the whole line.
    scale: f64,
    pub(crate) raw_mass: f64,
}

impl Tabulated {
    pub(crate) fn new(rows: &[(f64, f64)]) -> Result<Self> {
        if rows.len() < MIN_ROWS {
            return Err(Error::Format(format!(
                "need at least {MIN_ROWS} rows, got {}",
                rows.len()
            )));
        }
        if rows[0].0 != 0.0 {
            return Err(Error::Format(format!("first z must be 0, got {}", rows[0].0)));
        }
        for (i, &(z, f)) in rows.iter().enumerate() {
            if !z.is_finite() || !f.is_finite() {
                return Err(Error::Format(format!("row {i}: non-finite value ({z}, {f})")));
            }
            if f < 0.0 {
                return Err(Error::Format(format!("row {i}: negative density {f}")));
            }
            if i > 0 && z <= rows[i - 1].0 {
                return Err(Error::Format(format!(
                    "row {i}: z = {z} is not strictly greater than {}",
                    rows[i - 1].0
                )));
            }
        }
        let z: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let f: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let slopes = fritsch_carlson_slopes(&z, &f);
        let mut table = Tabulated {
            z,
            f,
            slopes,
            cumulative: Vec::new(),
            scale: 1.0,
            raw_mass: 0.0,
        };

        let mut cumulative = Vec::with_capacity(table.z.len());
        cumulative.push(0.0);
        let mut acc = 0.0;
        for i in 0..table.z.len() - 1 {
            let (a, b) = (table.z[i], table.z[i + 1]);
            acc += adaptive_simpson(|x| table.segment_value(i, x), a, b, CUMULATIVE_TOL);
            cumulative.push(acc);
        }
        let raw_mass = 2.0 * acc;
        if !(raw_mass.is_finite() && (raw_mass - 1.0).abs() <= MASS_SLACK) {
            return Err(Error::Data(format!(
                "tabulated density has total mass {raw_mass}, more than {}% away from 1",
                MASS_SLACK * 100.0
            )));
        }
        table.scale = 1.0 / raw_mass;
        table.cumulative = cumulative.into_iter().map(|m| m * table.scale).collect();
        table.raw_mass = raw_mass;
        Ok(table)
    }

    pub(crate) fn support_radius(&self) -> f64 {
        *self.z.last().expect("table is nonempty")
    }

    fn segment(&self, x: f64) -> usize {
        // Index i with z[i] <= x < z[i + 1], clamped to the last segment.
        let n = self.z.len();
        match self.z.binary_search_by(|v| v.partial_cmp(&x).expect("finite")) {
            Ok(i) => i.min(n - 2),
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// Raw (unnormalized) cubic Hermite value of segment `i` at `x`.
    fn segment_value(&self, i: usize, x: f64) -> f64 {
        let h = self.z[i + 1] - self.z[i];
        let t = (x - self.z[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let v = h00 * self.f[i] + h10 * h * self.slopes[i] + h01 * self.f[i + 1] + h11 * h * self.slopes[i + 1];
        v.max(0.0)
    }

    pub(crate) fn pdf(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax > self.support_radius() {
            return 0.0;
        }
        self.segment_value(self.segment(ax), ax) * self.scale
    }

    /// Normalized mass of `[0, x]` for `x >= 0`.
    fn half_mass(&self, x: f64) -> f64 {
        if x >= self.support_radius() {
            return 0.5;
        }
        let i = self.segment(x);
        let partial = adaptive_simpson(|t| self.segment_value(i, t), self.z[i], x, CUMULATIVE_TOL);
        (self.cumulative[i] + partial * self.scale).min(0.5)
    }

    pub(crate) fn cdf(&self, x: f64) -> f64 {
        let m = self.half_mass(x.abs());
        if x >= 0.0 {
            0.5 + m
        } else {
            0.5 - m
        }
    }

    /// Quantile by bisection on the half-line mass.
    pub(crate) fn quantile(&self, p: f64) -> f64 {
        if p == 0.5 {
            return 0.0;
        }
        let target = (p - 0.5).abs();
        // Locate the segment from the cumulative table, then bisect inside it.
        let i = match self
            .cumulative
            .binary_search_by(|v| v.partial_cmp(&target).expect("finite"))
        {
            Ok(i) => {
                let x = self.z[i];
                return if p > 0.5 { x } else { -x };
            }
            Err(i) => i.clamp(1, self.z.len() - 1) - 1,
        };
        let (mut lo, mut hi) = (self.z[i], self.z[i + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.half_mass(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = 0.5 * (lo + hi);
        if p > 0.5 {
            x
        } else {
            -x
        }
    }

    /// True when the sampled densities fall strictly until they first reach
    /// zero, and stay at zero afterwards.
    pub(crate) fn strictly_decreasing(&self) -> bool {
        let mut hit_zero = false;
        for w in self.f.windows(2) {
            if hit_zero {
                if w[1] != 0.0 {
                    return false;
                }
            } else if w[1] == 0.0 {
                hit_zero = true;
            } else if w[1] >= w[0] {
                return false;
            }
        }
        true
    }
}

/// Monotonicity-preserving Hermite slopes (Fritsch and Carlson, 1980).
fn fritsch_carlson_slopes(z: &[f64], f: &[f64]) -> Vec<f64> {
    let n = z.len();
    let h: Vec<f64> = z.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (f[i + 1] - f[i]) / h[i]).collect();
    let mut m = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] > 0.0 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // Symmetric extension makes z = 0 an extremum, so the slope there is 0.
    m[0] = 0.0;
    // One-sided secant at the far end; it satisfies the monotonicity bound.
    m[n - 1] = delta[n - 2];
    m
}

/// Parses the `z,f0` CSV layout into rows. Validation of the values
/// themselves happens when the family is built.
pub fn parse_table_csv<R: Read>(reader: R) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Format(format!("cannot read header: {e}")))?
        .clone();
    if headers.len() != 2 || &headers[0] != "z" || &headers[1] != "f0" {
        return Err(Error::Format(format!(
            "expected header \"z,f0\", got \"{}\"",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format(format!("row {}: {e}", i + 1)))?;
        let parse = |k: usize| -> Result<f64> {
            rec[k]
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("row {}: bad number {:?}: {e}", i + 1, &rec[k])))
        };
        rows.push((parse(0)?, parse(1)?));
    }
    Ok(rows)
}

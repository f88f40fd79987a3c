//! `start:stop:step` grids.

use std::str::FromStr;

const MAX_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(format!("grid {s:?} is not of the form start:stop:step"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?} in grid {s:?}"));
        let spec = GridSpec { start: num(start)?, stop: num(stop)?, step: num(step)? };
        if !(spec.start.is_finite() && spec.stop.is_finite() && spec.step.is_finite()) {
            return Err(format!("grid {s:?} has non-finite entries"));
        }
        if spec.step <= 0.0 {
            return Err(format!("grid step must be positive, got {}", spec.step));
        }
        if spec.stop < spec.start {
            return Err(format!("grid stop {} is below start {}", spec.stop, spec.start));
        }
        if (spec.stop - spec.start) / spec.step > MAX_POINTS as f64 {
            return Err(format!("grid {s:?} has more than {MAX_POINTS} points"));
        }
        Ok(spec)
    }
}

impl GridSpec {
    /// Points `start + i·step` up to `stop`, always ending exactly at `stop`.
    ///
    /// A last step shorter than a millionth of `step` is absorbed into the
    /// previous point rather than producing a near-duplicate.
    pub fn points(&self) -> Vec<f64> {
        let span = (self.stop - self.start) / self.step;
        let n = (span + 1e-6).floor() as usize;
        let mut out: Vec<f64> = (0..=n).map(|i| self.start + i as f64 * self.step).collect();
        let last = out.last_mut().expect("at least one point");
        if (self.stop - *last).abs() <= 1e-6 * self.step {
            *last = self.stop;
        } else {
            out.push(self.stop);
        }
        out
    }
}

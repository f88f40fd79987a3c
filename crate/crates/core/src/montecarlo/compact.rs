//! Laws supported on `{a ≤ |x| ≤ b}` used to probe the compact-support rule.

use serde::{Deserialize, Serialize};

use super::rng::{uniform, Stream};
use crate::error::{Error, Result};
use crate::rule::CompactBounds;

const PROB_TOL: f64 = 1e-9;
const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CompactDist {
    /// Finitely many atoms `(value, probability)`.
    Discrete { points: Vec<(f64, f64)> },
    /// `|X|` uniform on `[lo, hi]`, positive with probability `p_positive`.
    UniformMagnitude { lo: f64, hi: f64, p_positive: f64 },
    /// Weighted mixture `(weight, component)`.
    Mixture { components: Vec<(f64, CompactDist)> },
}

impl CompactDist {
    /// `±a` and `±b` with the given probabilities, in the order `a, -a, b, -b`.
    pub fn four_point(a: f64, b: f64, probs: [f64; 4]) -> Self {
        CompactDist::Discrete {
            points: vec![(a, probs[0]), (-a, probs[1]), (b, probs[2]), (-b, probs[3])],
        }
    }

    /// Checks that probabilities are valid and all mass sits in `a ≤ |x| ≤ b`.
    pub fn validate(&self, bounds: &CompactBounds) -> Result<()> {
        let inside = |v: f64| v >= bounds.a * (1.0 - SUPPORT_TOL) && v <= bounds.b * (1.0 + SUPPORT_TOL);
        match self {
            CompactDist::Discrete { points } => {
                if points.is_empty() {
                    return Err(Error::Config("discrete law has no atoms".into()));
                }
                check_weights(points.iter().map(|p| p.1))?;
                if let Some((x, _)) = points.iter().find(|(x, w)| *w > 0.0 && !inside(x.abs())) {
                    return Err(Error::Config(format!(
                        "atom at {x} lies outside {} <= |x| <= {}",
                        bounds.a, bounds.b
                    )));
                }
            }
            CompactDist::UniformMagnitude { lo, hi, p_positive } => {
                if !(lo <= hi && inside(*lo) && inside(*hi)) {
                    return Err(Error::Config(format!(
                        "uniform magnitude on [{lo}, {hi}] is not inside [{}, {}]",
                        bounds.a, bounds.b
                    )));
                }
                if !(0.0..=1.0).contains(p_positive) {
                    return Err(Error::Config(format!("p_positive = {p_positive} is not a probability")));
                }
            }
            CompactDist::Mixture { components } => {
                if components.is_empty() {
                    return Err(Error::Config("mixture has no components".into()));
                }
                check_weights(components.iter().map(|c| c.0))?;
                for (_, c) in components {
                    c.validate(bounds)?;
                }
            }
        }
        Ok(())
    }

    /// `(E X, E X²)` computed exactly.
    pub fn moments(&self) -> (f64, f64) {
        match self {
            CompactDist::Discrete { points } => points
                .iter()
                .fold((0.0, 0.0), |(m1, m2), &(x, w)| (m1 + w * x, m2 + w * x * x)),
            CompactDist::UniformMagnitude { lo, hi, p_positive } => {
                let m1 = (2.0 * p_positive - 1.0) * 0.5 * (lo + hi);
                let m2 = (lo * lo + lo * hi + hi * hi) / 3.0;
                (m1, m2)
            }
            CompactDist::Mixture { components } => components.iter().fold((0.0, 0.0), |(m1, m2), (w, c)| {
                let (c1, c2) = c.moments();
                (m1 + w * c1, m2 + w * c2)
            }),
        }
    }

    pub fn variance(&self) -> f64 {
        let (m1, m2) = self.moments();
        (m2 - m1 * m1).max(0.0)
    }

    /// `P(X² ≥ t)`, exactly.
    pub fn prob_square_at_least(&self, t: f64) -> f64 {
        match self {
            CompactDist::Discrete { points } => points.iter().filter(|(x, _)| x * x >= t).map(|p| p.1).sum(),
            CompactDist::UniformMagnitude { lo, hi, .. } => {
                let r = t.max(0.0).sqrt();
                if hi <= lo {
                    f64::from(u8::from(*lo >= r))
                } else {
                    ((hi - r.max(*lo)) / (hi - lo)).clamp(0.0, 1.0)
                }
            }
            CompactDist::Mixture { components } => {
                components.iter().map(|(w, c)| w * c.prob_square_at_least(t)).sum()
            }
        }
    }

    pub(crate) fn sample(&self, rng: &mut Stream) -> f64 {
        match self {
            CompactDist::Discrete { points } => {
                let u = uniform(rng);
                let mut acc = 0.0;
                for &(x, w) in points {
                    acc += w;
                    if u < acc {
                        return x;
                    }
                }
                // Rounding left a sliver of mass at the top; give it to the last atom with weight.
                points.iter().rev().find(|p| p.1 > 0.0).map_or(points[0].0, |p| p.0)
            }
            CompactDist::UniformMagnitude { lo, hi, p_positive } => {
                let mag = lo + (hi - lo) * uniform(rng);
                if uniform(rng) < *p_positive {
                    mag
                } else {
                    -mag
                }
            }
            CompactDist::Mixture { components } => {
                let u = uniform(rng);
                let mut acc = 0.0;
                for (w, c) in components {
                    acc += w;
                    if u < acc {
                        return c.sample(rng);
                    }
                }
                components.last().expect("validated nonempty").1.sample(rng)
            }
        }
    }
}

fn check_weights<I: Iterator<Item = f64>>(weights: I) -> Result<()> {
    let mut total = 0.0;
    for w in weights {
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::Config(format!("invalid probability {w}")));
        }
        total += w;
    }
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::Config(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_are_exact() {
        let d = CompactDist::four_point(1.0, 2.0, [0.25; 4]);
        assert_eq!(d.moments(), (0.0, 2.5));
        let u = CompactDist::UniformMagnitude { lo: 1.0, hi: 2.0, p_positive: 1.0 };
        let (m1, m2) = u.moments();
        assert!((m1 - 1.5).abs() < 1e-15 && (m2 - 7.0 / 3.0).abs() < 1e-15);
        assert!((u.variance() - 1.0 / 12.0).abs() < 1e-15);
        let mix = CompactDist::Mixture { components: vec![(0.5, d), (0.5, u)] };
        let (m1, m2) = mix.moments();
        assert!((m1 - 0.75).abs() < 1e-15 && (m2 - (2.5 + 7.0 / 3.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_tail() {
        let d = CompactDist::four_point(1.0, 2.0, [0.1, 0.2, 0.3, 0.4]);
        assert_eq!(d.prob_square_at_least(1.0), 1.0);
        assert!((d.prob_square_at_least(1.5) - 0.7).abs() < 1e-15);
        let u = CompactDist::UniformMagnitude { lo: 1.0, hi: 3.0, p_positive: 0.5 };
        assert!((u.prob_square_at_least(4.0) - 0.5).abs() < 1e-15);
        assert_eq!(u.prob_square_at_least(0.25), 1.0);
        assert_eq!(u.prob_square_at_least(10.0), 0.0);
    }

    #[test]
    fn support_is_checked() {
        let b = CompactBounds::new(1.0, 2.0).unwrap();
        assert!(CompactDist::four_point(1.0, 2.0, [0.1, 0.2, 0.3, 0.4]).validate(&b).is_ok());
        let bad = CompactDist::Discrete { points: vec![(0.5, 0.5), (1.5, 0.5)] };
        assert!(matches!(bad.validate(&b), Err(Error::Config(_))));
        let bad = CompactDist::UniformMagnitude { lo: 1.0, hi: 3.0, p_positive: 0.5 };
        assert!(bad.validate(&b).is_err());
        let bad = CompactDist::Discrete { points: vec![(1.0, 0.5), (2.0, 0.4)] };
        assert!(bad.validate(&b).is_err());
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The six interval constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    /// `X ± c|X|` for the location.
    MeanAr,
    /// `(-c|X|, c|X|)` for the location.
    MeanStein,
    /// `σ ≤ |X|/c` under the normal model.
    SigmaNormal,
    /// `σ ≤ |X|/c` under a symmetric unimodal family.
    SigmaGeneral,
    /// `σ² ≤ X²/c²` for any law with `a ≤ |X| ≤ b`.
    SigmaCompact,
    /// `‖μ‖ ≤ c‖X‖/√m` for `m` draws from a `p`-variate normal.
    MeanMultivariate,
}

impl RuleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleKind::MeanAr => "mean-ar",
            RuleKind::MeanStein => "mean-stein",
            RuleKind::SigmaNormal => "sigma-normal",
            RuleKind::SigmaGeneral => "sigma-general",
            RuleKind::SigmaCompact => "sigma-compact",
            RuleKind::MeanMultivariate => "mean-multivariate",
        }
    }

    pub fn is_mean(self) -> bool {
        matches!(self, RuleKind::MeanAr | RuleKind::MeanStein)
    }
}

impl std::fmt::Display for RuleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mean-ar" => RuleKind::MeanAr,
            "mean-stein" => RuleKind::MeanStein,
            "sigma-normal" => RuleKind::SigmaNormal,
            "sigma-general" => RuleKind::SigmaGeneral,
            "sigma-compact" => RuleKind::SigmaCompact,
            "mean-multivariate" => RuleKind::MeanMultivariate,
            other => return Err(Error::Config(format!("unknown rule kind {other:?}"))),
        })
    }
}

/// Support bounds `a ≤ |X| ≤ b` for the compact-support rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompactBounds {
    pub a: f64,
    pub b: f64,
}

impl CompactBounds {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b >= a) {
            return Err(Error::Domain(format!("need 0 < a <= b < inf, got a = {a}, b = {b}")));
        }
        Ok(CompactBounds { a, b })
    }

    /// `K² = 4 / (b/a + a/b)²`.
    pub fn k_squared(&self) -> f64 {
        let r = self.b / self.a;
        let s = r + 1.0 / r;
        4.0 / (s * s)
    }

    /// `1 - K²`, written as `((r - 1/r)/(r + 1/r))²` so it stays exact near `a = b`.
    pub fn one_minus_k_squared(&self) -> f64 {
        let r = self.b / self.a;
        let d = (r - 1.0 / r) / (r + 1.0 / r);
        d * d
    }
}

/// Dimension `p` and sample size `m` for the multivariate rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub p: usize,
    pub m: usize,
}

/// A calibrated interval rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRule {
    pub kind: RuleKind,
    pub c: f64,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compact_bounds: Option<CompactBounds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Dims>,
}

impl IntervalRule {
    /// Checks that exactly the fields relevant to `kind` are set and that
    /// the constants lie in range.
    pub fn validate(&self) -> Result<()> {
        crate::error::check_alpha(self.alpha)?;
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::Domain(format!("c must be finite and positive, got {}", self.c)));
        }
        let want_family = matches!(
            self.kind,
            RuleKind::MeanAr | RuleKind::MeanStein | RuleKind::SigmaNormal | RuleKind::SigmaGeneral
        );
        let want_bounds = self.kind == RuleKind::SigmaCompact;
        let want_dims = self.kind == RuleKind::MeanMultivariate;
        if want_family != self.family.is_some()
            || want_bounds != self.compact_bounds.is_some()
            || want_dims != self.dims.is_some()
        {
            return Err(Error::Config(format!("fields populated inconsistently for {} rule", self.kind)));
        }
        if self.kind.is_mean() && self.c <= 1.0 {
            return Err(Error::Domain(format!("{} needs c > 1, got {}", self.kind, self.c)));
        }
        if self.kind == RuleKind::SigmaNormal && self.family.as_deref() != Some("normal") {
            return Err(Error::Config("sigma-normal rule must use the normal family".into()));
        }
        if let Some(bounds) = self.compact_bounds {
            let min_alpha = bounds.one_minus_k_squared();
            if self.alpha <= min_alpha {
                return Err(Error::InfeasibleAlpha { alpha: self.alpha, min_alpha });
            }
        }
        if let Some(d) = self.dims {
            if d.p == 0 || d.m == 0 {
                return Err(Error::Domain("p and m must be positive".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_squared_values() {
        let b = CompactBounds::new(1.0, 2.0).unwrap();
        assert!((b.k_squared() - 0.64).abs() < 1e-15);
        assert!((b.one_minus_k_squared() - 0.36).abs() < 1e-15);
        let eq = CompactBounds::new(1.0, 1.0).unwrap();
        assert_eq!(eq.k_squared(), 1.0);
        assert_eq!(eq.one_minus_k_squared(), 0.0);
        assert!(CompactBounds::new(2.0, 1.0).is_err());
        assert!(CompactBounds::new(0.0, 1.0).is_err());
    }

    #[test]
    fn validation_catches_mismatched_fields() {
        let mut r = IntervalRule {
            kind: RuleKind::MeanAr,
            c: 2.0,
            alpha: 0.1,
            family: Some("normal".into()),
            compact_bounds: None,
            dims: None,
        };
        assert!(r.validate().is_ok());
        r.dims = Some(Dims { p: 2, m: 1 });
        assert!(matches!(r.validate(), Err(Error::Config(_))));
        r.dims = None;
        r.c = 0.9;
        assert!(matches!(r.validate(), Err(Error::Domain(_))));
    }

    #[test]
    fn kind_names_round_trip() {
        for k in [
            RuleKind::MeanAr,
            RuleKind::MeanStein,
            RuleKind::SigmaNormal,
            RuleKind::SigmaGeneral,
            RuleKind::SigmaCompact,
            RuleKind::MeanMultivariate,
        ] {
            assert_eq!(k.as_str().parse::<RuleKind>().unwrap(), k);
        }
    }
}

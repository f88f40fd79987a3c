//! Covariance specifications for the multivariate sampler.

use serde::{Deserialize, Serialize};

use super::rng::{std_normal, stream};
use crate::error::{Error, Result};

/// Smallest admissible Cholesky pivot.
pub const PD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CovarianceSpec {
    Identity,
    ScaledIdentity { scale: f64 },
    Diagonal { diag: Vec<f64> },
    /// Row-major symmetric matrix.
    Dense { rows: Vec<Vec<f64>> },
}

impl CovarianceSpec {
    /// `diag(1, …, 10)` with entries equally spaced over `p` coordinates.
    pub fn spread_diagonal(p: usize) -> Self {
        let diag = if p == 1 {
            vec![1.0]
        } else {
            (0..p).map(|i| 1.0 + 9.0 * i as f64 / (p - 1) as f64).collect()
        };
        CovarianceSpec::Diagonal { diag }
    }

    /// `Q D Qᵀ` for a rotation `Q` drawn by orthonormalizing a Gaussian
    /// matrix generated from `seed`.
    pub fn rotated_diagonal(diag: &[f64], seed: u64) -> Self {
        let p = diag.len();
        let mut rng = stream(seed, 0);
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(p);
        while q.len() < p {
            let mut v: Vec<f64> = (0..p).map(|_| std_normal(&mut rng)).collect();
            for u in &q {
                let d: f64 = v.iter().zip(u).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                v.iter_mut().for_each(|x| *x /= norm);
                q.push(v);
            }
        }
        let rows = (0..p)
            .map(|i| (0..p).map(|j| (0..p).map(|k| q[k][i] * diag[k] * q[k][j]).sum()).collect())
            .collect();
        CovarianceSpec::Dense { rows }
    }

    pub fn describe(&self) -> String {
        match self {
            CovarianceSpec::Identity => "identity".into(),
            CovarianceSpec::ScaledIdentity { scale } => format!("{scale}·I"),
            CovarianceSpec::Diagonal { diag } => format!("diag{diag:?}"),
            CovarianceSpec::Dense { rows } => format!("dense {}x{}", rows.len(), rows.len()),
        }
    }

    /// Lower-triangular square root `L` with `L Lᵀ = Σ`, stored row-major.
    pub fn factor(&self, p: usize) -> Result<Factor> {
        match self {
            CovarianceSpec::Identity => Ok(Factor::Diagonal(vec![1.0; p])),
            CovarianceSpec::ScaledIdentity { scale } => {
                if !(scale.is_finite() && *scale > PD_TOL) {
                    return Err(Error::Config(format!("scaled identity needs a positive scale, got {scale}")));
                }
                Ok(Factor::Diagonal(vec![scale.sqrt(); p]))
            }
            CovarianceSpec::Diagonal { diag } => {
                if diag.len() != p {
                    return Err(Error::Config(format!("diagonal has {} entries, expected {p}", diag.len())));
                }
                if let Some(d) = diag.iter().find(|d| !(d.is_finite() && **d > PD_TOL)) {
                    return Err(Error::Config(format!("covariance is not positive definite (diagonal entry {d})")));
                }
                Ok(Factor::Diagonal(diag.iter().map(|d| d.sqrt()).collect()))
            }
            CovarianceSpec::Dense { rows } => cholesky(rows, p).map(Factor::Lower),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    Diagonal(Vec<f64>),
    Lower(Vec<Vec<f64>>),
}

impl Factor {
    /// `out = L z`.
    #[inline]
    pub(crate) fn apply(&self, z: &[f64], out: &mut [f64]) {
        match self {
            Factor::Diagonal(d) => {
                for ((o, zi), di) in out.iter_mut().zip(z).zip(d) {
                    *o = zi * di;
                }
            }
            Factor::Lower(l) => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = l[i][..=i].iter().zip(z).map(|(a, b)| a * b).sum();
                }
            }
        }
    }
}

fn cholesky(a: &[Vec<f64>], p: usize) -> Result<Vec<Vec<f64>>> {
    if a.len() != p || a.iter().any(|r| r.len() != p) {
        return Err(Error::Config(format!("dense covariance must be {p}x{p}")));
    }
    for i in 0..p {
        for j in 0..i {
            let scale = a[i][i].abs().max(a[j][j].abs()).max(1.0);
            if (a[i][j] - a[j][i]).abs() > 1e-12 * scale {
                return Err(Error::Config(format!("covariance is not symmetric at ({i}, {j})")));
            }
        }
    }
    let mut l = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let pivot = a[i][i] - s;
                if !(pivot > PD_TOL) {
                    return Err(Error::Config(format!(
                        "covariance is not positive definite (pivot {pivot} at {i})"
                    )));
                }
                l[i][i] = pivot.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Ok(l)
}

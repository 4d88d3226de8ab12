use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::linalg::cholesky;
use crate::numkit::sample::{mvn, uniform};
use crate::numkit::{Matrix, RngStream};

/// Exchangeable-covariance normal sample with its last rows missing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MvnConfig {
    pub n: usize,
    pub p: usize,
    pub rho: f64,
    pub sigma2: f64,
    /// Fraction of rows removed; n_obs = ⌊(1 − f) n⌋.
    pub f: f64,
    pub mu: Vec<f64>,
}

impl MvnConfig {
    /// Null-size configuration: n = 100, σ² = 5, μ = 1.
    pub fn size(p: usize, rho: f64, f: f64) -> Self {
        Self { n: 100, p, rho, sigma2: 5.0, f, mu: vec![1.0; p] }
    }

    /// Power configuration: f = ½, p = 2, ρ = 0.8, σ² = 5, μ = (δ − 2, 2δ − 2).
    pub fn power(n: usize, delta: f64) -> Self {
        Self { n, p: 2, rho: 0.8, sigma2: 5.0, f: 0.5, mu: vec![-2.0 + delta, -2.0 + 2.0 * delta] }
    }

    pub fn covariance(&self) -> Matrix {
        let mut s = Matrix::zeros(self.p, self.p);
        for i in 0..self.p {
            for j in 0..self.p {
                s[(i, j)] = self.sigma2 * if i == j { 1.0 } else { self.rho };
            }
        }
        s
    }

    pub fn n_obs(&self) -> usize {
        ((1.0 - self.f) * self.n as f64 + 1e-9).floor() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MvnTruth {
    pub mu: Vec<f64>,
    pub sigma: Matrix,
    pub f: f64,
    pub n_obs: usize,
}

/// Draw the complete sample and blank out rows `n_obs..n`.
pub fn generate_mvn_experiment_data(cfg: &MvnConfig, rng: &mut RngStream) -> Result<(Matrix, MvnTruth)> {
    if !(cfg.f >= 0.0 && cfg.f < 1.0) {
        return Err(Error::InvalidArgument(format!("missing fraction {} outside [0, 1)", cfg.f)));
    }
    if cfg.mu.len() != cfg.p {
        return Err(Error::DimensionMismatch("mean length differs from p".into()));
    }
    let sigma = cfg.covariance();
    let chol = cholesky(&sigma).map_err(|_| Error::InvalidArgument(format!("rho = {} gives a non-SPD covariance", cfg.rho)))?;
    let n_obs = cfg.n_obs();
    let mut x = Matrix::zeros(cfg.n, cfg.p);
    for i in 0..cfg.n {
        let row = mvn(&cfg.mu, &chol, rng);
        let dst = x.row_mut(i);
        if i < n_obs {
            dst.copy_from_slice(&row);
        } else {
            dst.iter_mut().for_each(|v| *v = f64::NAN);
        }
    }
    Ok((x, MvnTruth { mu: cfg.mu.clone(), sigma, f: cfg.f, n_obs }))
}

/// Normal sample with AR-type correlation 0.5^|i−j| and logistic monotone dropout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneConfig {
    pub n: usize,
    pub p: usize,
    pub delta: f64,
    pub alpha0: f64,
    pub alpha1: f64,
}

impl MonotoneConfig {
    pub fn study(delta: f64, alpha0: f64, alpha1: f64) -> Self {
        Self { n: 500, p: 5, delta, alpha0, alpha1 }
    }

    pub fn covariance(&self) -> Matrix {
        let mut s = Matrix::zeros(self.p, self.p);
        for i in 0..self.p {
            for j in 0..self.p {
                s[(i, j)] = 0.5f64.powi((i as i32 - j as i32).abs());
            }
        }
        s
    }

    /// Probability that X_j goes missing given X_{j−1} observed with value `prev`.
    pub fn dropout(&self, prev: f64) -> f64 {
        1.0 / (1.0 + (self.alpha0 + self.alpha1 * prev).exp())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneData {
    pub complete: Matrix,
    pub observed: Matrix,
}

/// Rows are sorted so that those observing more variables come first.
pub fn generate_monotone_data(cfg: &MonotoneConfig, rng: &mut RngStream) -> Result<MonotoneData> {
    if cfg.p < 2 {
        return Err(Error::InvalidArgument("monotone data needs p >= 2".into()));
    }
    let chol = cholesky(&cfg.covariance())?;
    let mu = vec![cfg.delta; cfg.p];
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let x = mvn(&mu, &chol, rng);
        let mut last = cfg.p;
        for j in 1..cfg.p {
            if uniform(rng) < cfg.dropout(x[j - 1]) {
                last = j;
                break;
            }
        }
        rows.push((last, x));
    }
    rows.sort_by(|a, b| b.0.cmp(&a.0));
    let mut complete = Matrix::zeros(cfg.n, cfg.p);
    let mut observed = Matrix::zeros(cfg.n, cfg.p);
    for (i, (last, x)) in rows.iter().enumerate() {
        complete.row_mut(i).copy_from_slice(x);
        for j in 0..cfg.p {
            observed[(i, j)] = if j < *last { x[j] } else { f64::NAN };
        }
    }
    Ok(MonotoneData { complete, observed })
}

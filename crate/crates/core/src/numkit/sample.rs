//! Random variate generators on top of [`RngStream`].

use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::{Cholesky, Matrix};
use super::rng::RngStream;
use crate::error::{invalid, Result};

pub fn std_normal(rng: &mut RngStream) -> f64 {
    rng.sample(StandardNormal)
}

pub fn uniform(rng: &mut RngStream) -> f64 {
    rng.random::<f64>()
}

/// `μ + L z` with `z` standard normal.
pub fn mvn(mean: &[f64], chol: &Cholesky, rng: &mut RngStream) -> Vec<f64> {
    let p = mean.len();
    let z: Vec<f64> = (0..p).map(|_| std_normal(rng)).collect();
    let l = chol.lower();
    (0..p).map(|i| mean[i] + (0..=i).map(|j| l[(i, j)] * z[j]).sum::<f64>()).collect()
}

/// Gamma(shape, 1) by Marsaglia and Tsang; shapes below one use the
/// `U^{1/a}` boost.
pub fn gamma(shape: f64, rng: &mut RngStream) -> Result<f64> {
    if !(shape > 0.0) || !shape.is_finite() {
        return invalid(format!("gamma shape must be positive, got {shape}"));
    }
    if shape < 1.0 {
        let g = gamma(shape + 1.0, rng)?;
        let u: f64 = uniform(rng);
        return Ok(g * u.powf(1.0 / shape));
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let (x, v) = loop {
            let x = std_normal(rng);
            let v = 1.0 + c * x;
            if v > 0.0 {
                break (x, v * v * v);
            }
        };
        let u = uniform(rng);
        if u < 1.0 - 0.0331 * x.powi(4) {
            return Ok(d * v);
        }
        if u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
            return Ok(d * v);
        }
    }
}

pub fn chi_square(df: f64, rng: &mut RngStream) -> Result<f64> {
    Ok(2.0 * gamma(0.5 * df, rng)?)
}

/// Wishart(df, S) by the Bartlett decomposition, `S = L Lᵀ` given as its factor.
pub fn wishart(df: f64, scale: &Cholesky, rng: &mut RngStream) -> Result<Matrix> {
    let p = scale.dim();
    if !(df > p as f64 - 1.0) {
        return invalid(format!("wishart df {df} must exceed dim - 1 = {}", p as f64 - 1.0));
    }
    let mut a = Matrix::zeros(p, p);
    for i in 0..p {
        a[(i, i)] = chi_square(df - i as f64, rng)?.sqrt();
        for j in 0..i {
            a[(i, j)] = std_normal(rng);
        }
    }
    let la = scale.lower().matmul(&a)?;
    let mut w = la.matmul(&la.transpose())?;
    w.symmetrize();
    Ok(w)
}

pub fn dirichlet(alpha: &[f64], rng: &mut RngStream) -> Result<Vec<f64>> {
    if alpha.is_empty() || alpha.iter().any(|&a| !(a > 0.0)) {
        return invalid("dirichlet parameters must be strictly positive");
    }
    let g = alpha.iter().map(|&a| gamma(a, rng)).collect::<Result<Vec<_>>>()?;
    let s: f64 = g.iter().sum();
    Ok(g.into_iter().map(|x| x / s).collect())
}

/// Index drawn with probability proportional to `weights`.
pub fn categorical(weights: &[f64], rng: &mut RngStream) -> Result<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || weights.iter().any(|&w| w < 0.0) {
        return invalid("categorical weights must be nonnegative with a positive sum");
    }
    let u = uniform(rng) * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return Ok(i);
        }
    }
    Ok(weights.iter().rposition(|&w| w > 0.0).unwrap_or(0))
}

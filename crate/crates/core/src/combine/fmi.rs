use serde::{Deserialize, Serialize};

use super::moments::{d_wt, PooledMoments};
use crate::error::{Error, Result};
use crate::models::{Constraint, LikelihoodModel};

/// Which estimator of the odds of missing information produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FmiMethod {
    WtPrime,
    Wt1,
    WtHalf,
    Legacy,
    LegacyPlus,
    Avg,
    AvgPlus,
    Rob,
    Pert,
    Stack,
    StackPlus,
    StackRob,
}

impl FmiMethod {
    /// Estimators that are nonnegative by construction.
    pub fn is_nonnegative(&self) -> bool {
        matches!(self, Self::LegacyPlus | Self::AvgPlus | Self::Rob | Self::Pert | Self::StackPlus | Self::StackRob)
    }
}

/// Whether df formulas should use k or h as their dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DfBasis {
    K,
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FmiEstimate {
    pub r_hat: f64,
    pub method: FmiMethod,
    pub negative: bool,
    pub basis: DfBasis,
}

impl FmiEstimate {
    pub fn new(r_hat: f64, method: FmiMethod, basis: DfBasis) -> Self {
        Self { r_hat, method, negative: r_hat < 0.0, basis }
    }

    pub fn plus(self) -> Self {
        let method = match self.method {
            FmiMethod::Legacy => FmiMethod::LegacyPlus,
            FmiMethod::Avg => FmiMethod::AvgPlus,
            FmiMethod::Stack => FmiMethod::StackPlus,
            other => other,
        };
        Self { r_hat: self.r_hat.max(0.0), method, negative: self.negative, basis: self.basis }
    }

    /// f̂ = r̂ / (1 + r̂).
    pub fn fraction(&self) -> f64 {
        self.r_hat / (1.0 + self.r_hat)
    }
}

fn check_mk(m: usize, dim: usize) -> Result<(f64, f64)> {
    if m < 2 || dim == 0 {
        return Err(Error::InvalidArgument(format!("estimating r needs m >= 2 and dim >= 1, got m = {m}, dim = {dim}")));
    }
    Ok((m as f64, dim as f64))
}

/// (m + 1) / (dim (m − 1)) · gap, the shared shape of the likelihood-based estimators.
pub fn odds_from_gap(gap: f64, dim: usize, m: usize) -> Result<f64> {
    let (mf, d) = check_mk(m, dim)?;
    Ok((mf + 1.0) / (d * (mf - 1.0)) * gap)
}

/// Components of the Wald-type estimator with Ū in place of T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaldPrime {
    /// Average of d_wt(θ̂^ℓ, Ū).
    pub d_bar: f64,
    /// d_wt(θ̄, Ū).
    pub d_tilde: f64,
    pub r: FmiEstimate,
}

pub fn r_wald_prime(moments: &PooledMoments, thetas: &[Vec<f64>], theta0: &[f64]) -> Result<WaldPrime> {
    let (m, k) = (moments.m, moments.k);
    if thetas.len() != m {
        return Err(Error::DimensionMismatch(format!("{} estimates for m = {m}", thetas.len())));
    }
    let mut d_bar = 0.0;
    for t in thetas {
        d_bar += d_wt(t, theta0, &moments.u_bar)?;
    }
    d_bar /= m as f64;
    let d_tilde = d_wt(&moments.theta_bar, theta0, &moments.u_bar)?;
    let r = odds_from_gap(d_bar - d_tilde, k, m)?;
    Ok(WaldPrime { d_bar, d_tilde, r: FmiEstimate::new(r, FmiMethod::WtPrime, DfBasis::K) })
}

fn sample_variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Moment estimator from the spread of the per-dataset Wald statistics.
pub fn r_wald_one(d: &[f64], k: usize) -> Result<FmiEstimate> {
    let (m, kf) = check_mk(d.len(), k)?;
    let s2 = sample_variance(d);
    let d_bar = d.iter().sum::<f64>() / m;
    let denom = 2.0 * d_bar + (4.0 * d_bar * d_bar - 2.0 * kf * s2).max(0.0).sqrt();
    let r = if denom > 0.0 { (1.0 + 1.0 / m) * s2 / denom } else { 0.0 };
    Ok(FmiEstimate::new(r, FmiMethod::Wt1, DfBasis::K))
}

/// Moment estimator from the spread of the square roots of the per-dataset Wald statistics.
pub fn r_wald_half(d: &[f64]) -> Result<FmiEstimate> {
    let (m, _) = check_mk(d.len(), 1)?;
    let roots: Vec<f64> = d.iter().map(|x| x.max(0.0).sqrt()).collect();
    Ok(FmiEstimate::new((1.0 + 1.0 / m) * sample_variance(&roots), FmiMethod::WtHalf, DfBasis::K))
}

/// Perturbation estimator. Datasets whose perturbed null estimate leaves
/// the parameter space are skipped; the second value counts them.
pub fn r_perturbation<M: LikelihoodModel + ?Sized>(model: &M, xs: &[M::Data]) -> Result<(FmiEstimate, usize)> {
    let m = xs.len();
    check_mk(m, model.k())?;
    let star = model.averaged_mle(xs, Constraint::Free)?;
    let star0 = model.averaged_mle(xs, Constraint::Null)?;
    let delta: Vec<f64> = star.iter().zip(&star0).map(|(a, b)| a - b).collect();
    let (mut sum, mut used, mut skipped) = (0.0, 0usize, 0usize);
    for x in xs {
        let free = model.mle(x, Constraint::Free)?;
        let null = model.mle(x, Constraint::Null)?;
        let moved: Vec<f64> = null.iter().zip(&delta).map(|(a, b)| a + b).collect();
        match model.loglik(&moved, x) {
            Ok(l) if l.is_finite() => {
                sum += 2.0 * (model.loglik(&free, x)? - l);
                used += 1;
            }
            _ => skipped += 1,
        }
    }
    if used == 0 {
        return Err(Error::DegenerateData("every perturbed null estimate left the parameter space".into()));
    }
    let r = odds_from_gap(sum / used as f64, model.k(), m)?;
    Ok((FmiEstimate::new(r, FmiMethod::Pert, DfBasis::K), skipped))
}

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{Constraint, Direction, LikelihoodModel, Param, reparametrize};

/// Per-dataset summaries: mean complete-data LRT statistic d̄_L and mean
/// twice-maximized log-likelihood δ̄.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerDataset {
    pub d_bar: f64,
    pub delta_bar: f64,
}

pub fn per_dataset<M: LikelihoodModel + ?Sized>(model: &M, xs: &[M::Data]) -> Result<PerDataset> {
    nonempty(xs)?;
    let (mut d, mut delta) = (0.0, 0.0);
    for x in xs {
        let free = model.loglik_max(x, Constraint::Free)?;
        let null = model.loglik_max(x, Constraint::Null)?;
        d += free - null;
        delta += free;
    }
    let m = xs.len() as f64;
    Ok(PerDataset { d_bar: d / m, delta_bar: delta / m })
}

/// The statistic built by evaluating every dataset's likelihood at the
/// average of the per-dataset estimates, averaged in the coordinates of `map`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegacyLrt {
    pub d_tilde: f64,
    pub psi_bar: Vec<f64>,
    pub psi0_bar: Vec<f64>,
}

pub fn legacy_lrt<M: LikelihoodModel + ?Sized>(model: &M, xs: &[M::Data], map: Param) -> Result<LegacyLrt> {
    nonempty(xs)?;
    let mut free = Vec::with_capacity(xs.len());
    let mut null = Vec::with_capacity(xs.len());
    for x in xs {
        free.push(reparametrize(model, &model.mle(x, Constraint::Free)?, map, Direction::Forward)?);
        null.push(reparametrize(model, &model.mle(x, Constraint::Null)?, map, Direction::Forward)?);
    }
    let psi_bar = reparametrize(model, &mean_vec(&free), map, Direction::Inverse)?;
    let psi0_bar = reparametrize(model, &mean_vec(&null), map, Direction::Inverse)?;
    let mut d = 0.0;
    for x in xs {
        d += 2.0 * (model.loglik(&psi_bar, x)? - model.loglik(&psi0_bar, x)?);
    }
    let d_tilde = d / xs.len() as f64;
    if !d_tilde.is_finite() {
        return Err(Error::DegenerateData("averaged estimates fall outside the parameter space".into()));
    }
    Ok(LegacyLrt { d_tilde, psi_bar, psi0_bar })
}

/// d̂_L = 2{L̄(ψ̂*) − L̄(ψ̂₀*)} and δ̂_L = 2L̄(ψ̂*) from the averaged likelihood.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AveragedLrt {
    pub d_hat: f64,
    pub delta_hat: f64,
    pub psi_star: Vec<f64>,
    pub psi0_star: Vec<f64>,
}

pub fn averaged_lrt<M: LikelihoodModel + ?Sized>(model: &M, xs: &[M::Data]) -> Result<AveragedLrt> {
    nonempty(xs)?;
    let psi_star = model.averaged_mle(xs, Constraint::Free)?;
    let psi0_star = model.averaged_mle(xs, Constraint::Null)?;
    let free = model.averaged_loglik(&psi_star, xs)?;
    let null = model.averaged_loglik(&psi0_star, xs)?;
    Ok(AveragedLrt { d_hat: 2.0 * (free - null), delta_hat: 2.0 * free, psi_star, psi0_star })
}

pub fn d_hat_avg<M: LikelihoodModel + ?Sized>(model: &M, xs: &[M::Data]) -> Result<f64> {
    Ok(averaged_lrt(model, xs)?.d_hat)
}

/// d̂_S and δ̂_S: complete-data routines applied once to the stacked data, divided by m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StackedLrt {
    pub d_hat: f64,
    pub delta_hat: f64,
}

pub fn stacked_lrt<M: LikelihoodModel + ?Sized>(model: &M, xs: &[M::Data]) -> Result<StackedLrt> {
    nonempty(xs)?;
    let s = model.stack(xs)?;
    let m = xs.len() as f64;
    let free = model.loglik_max(&s, Constraint::Free)?;
    let null = model.loglik_max(&s, Constraint::Null)?;
    Ok(StackedLrt { d_hat: (free - null) / m, delta_hat: free / m })
}

fn nonempty<T>(xs: &[T]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument("no completed datasets".into()));
    }
    Ok(())
}

fn mean_vec(v: &[Vec<f64>]) -> Vec<f64> {
    let n = v.len() as f64;
    (0..v[0].len()).map(|j| v.iter().map(|x| x[j]).sum::<f64>() / n).collect()
}

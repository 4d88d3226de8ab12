use rayon::prelude::*;

use crate::combine::{averaged_lrt, odds_from_gap, per_dataset, stacked_lrt};
use crate::error::Result;
use crate::imputers::CompletedDatasets;
use crate::models::{Ar1Model, LikelihoodModel, Series};
use crate::numkit::sample::std_normal;
use crate::numkit::RngStream;

const STUDY_KEY: u64 = 4;

/// Stationary AR(1) path with unit innovation variance.
pub fn ar1_series(n: usize, phi: f64, rng: &mut RngStream) -> Series {
    let mut x = Vec::with_capacity(n);
    let mut prev = std_normal(rng) / (1.0 - phi * phi).sqrt();
    x.push(prev);
    for _ in 1..n {
        prev = phi * prev + std_normal(rng);
        x.push(prev);
    }
    x
}

/// Blank every `every`-th interior value and fill each one `m` times from
/// its conditional law given both neighbours under the generating model,
/// N(φ(x₋ + x₊)/(1 + φ²), 1/(1 + φ²)).
pub fn ar1_conditional_imputations(x: &[f64], phi: f64, every: usize, m: usize, rng: &mut RngStream) -> Vec<Series> {
    let sd = (1.0 / (1.0 + phi * phi)).sqrt();
    (0..m)
        .map(|_| {
            let mut y = x.to_vec();
            let mut t = 1;
            while t + 1 < y.len() {
                let mean = phi * (x[t - 1] + x[t + 1]) / (1.0 + phi * phi);
                y[t] = mean + sd * std_normal(rng);
                t += every;
            }
            y
        })
        .collect()
}

/// Differences between the stacked and averaged-likelihood quantities on one replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar1Gap {
    pub d: f64,
    pub r: f64,
}

/// |d̂_S − d̂_L| and |r̂_S − r̂_L| over `replicates` AR(1) replicates of length `n`.
pub fn ar1_stack_gap(n: usize, m: usize, phi: f64, replicates: usize, seed: u64) -> Result<Vec<Ar1Gap>> {
    let model = Ar1Model;
    (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let mut rng = RngStream::keyed(seed, &[STUDY_KEY, n as u64, m as u64, phi.to_bits(), rep as u64]);
            let x = ar1_series(n, phi, &mut rng);
            let xs = ar1_conditional_imputations(&x, phi, 4, m, &mut rng);
            let done = CompletedDatasets::from_datasets(xs)?;
            let pd = per_dataset(&model, &done.datasets)?;
            let s = stacked_lrt(&model, &done.datasets)?;
            let a = averaged_lrt(&model, &done.datasets)?;
            let k = model.k();
            let r_s = odds_from_gap(pd.d_bar - s.d_hat, k, m)?;
            let r_l = odds_from_gap(pd.d_bar - a.d_hat, k, m)?;
            Ok(Ar1Gap { d: (s.d_hat - a.d_hat).abs(), r: (r_s - r_l).abs() })
        })
        .collect()
}

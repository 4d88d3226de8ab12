use rayon::prelude::*;

use super::record::{rate, Record};
use super::spec::NulldistGrid;
use crate::combine::{df_denominator, simulate_null_d, DfKind, NullDistSpec, Representation};
use crate::error::Result;
use crate::numkit::{Continuous, FDist, RngStream};

const STUDY_KEY: u64 = 1;

/// Tail rates of the limiting statistic against the quantiles of
/// F(k, d̂f(r_m, h)) (`alpha_hat`) and F(k, d̃f(r_m, h)) (`alpha_tilde`).
pub fn run_nulldist_study(grid: &NulldistGrid, draws: usize, seed: u64) -> Result<Vec<Record>> {
    let mut points = Vec::new();
    for &m in &grid.m {
        for &k in &grid.k {
            for &tau in &grid.tau {
                for &f in &grid.f_m {
                    points.push((m, k, tau, f));
                }
            }
        }
    }
    let per_point: Vec<Result<Vec<Record>>> = points
        .par_iter()
        .enumerate()
        .map(|(gi, &(m, k, tau, f))| {
            let r_m = f / (1.0 - f);
            let h = tau * k;
            let spec = NullDistSpec { r_m, k, h, m, representation: Representation::ByH };
            let mut rng = RngStream::keyed(seed, &[STUDY_KEY, gi as u64]);
            let d = simulate_null_d(&spec, draws, &mut rng)?;
            let new = FDist::new(k as f64, df_denominator(DfKind::New, r_m, h, m)?)?;
            let old = FDist::new(k as f64, df_denominator(DfKind::Classic, r_m, h, m)?)?;
            let mut out = Vec::new();
            for &alpha in &grid.alpha {
                let point = vec![
                    ("m".to_string(), m as f64),
                    ("k".to_string(), k as f64),
                    ("tau".to_string(), tau as f64),
                    ("f_m".to_string(), f),
                    ("alpha".to_string(), alpha),
                ];
                for (metric, dist) in [("alpha_hat", &new), ("alpha_tilde", &old)] {
                    let crit = dist.quantile(1.0 - alpha)?;
                    let (value, mc_se) = rate(d.iter().filter(|&&x| x > crit).count(), draws);
                    out.push(Record {
                        point: point.clone(),
                        method: "-".into(),
                        param: "-".into(),
                        metric: metric.into(),
                        value,
                        mc_se,
                        count: draws,
                    });
                }
            }
            Ok(out)
        })
        .collect();
    let mut records = Vec::new();
    for r in per_point {
        records.extend(r?);
    }
    Ok(records)
}

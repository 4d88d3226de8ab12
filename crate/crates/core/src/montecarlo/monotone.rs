use rayon::prelude::*;

use super::mvn::{run_slots, slots, summarize, Outcome, Wanted, MAX_ATTEMPTS};
use super::record::{mean_se, Record};
use super::spec::MonotoneGrid;
use crate::combine::pool_moments;
use crate::error::Result;
use crate::imputers::{generate_monotone_data, impute_monotone_regression, CompletedDatasets, MonotoneConfig};
use crate::models::{LikelihoodModel, MeanNull, MvnModel, Param, WaldComponents};
use crate::numkit::{Matrix, RngStream};

const STUDY_KEY: u64 = 3;

/// Per-variable fraction of missing information for the mean,
/// (1 + 1/m) B_jj / T_jj.
pub fn mean_fmi(model: &MvnModel, done: &CompletedDatasets<Matrix>) -> Result<Vec<f64>> {
    let parts: Vec<WaldComponents> = done.datasets.iter().map(|x| model.wald(x, Param::I)).collect::<Result<_>>()?;
    let pm = pool_moments(&parts)?;
    let m = done.m() as f64;
    Ok((0..pm.k).map(|j| (1.0 + 1.0 / m) * pm.b[(j, j)] / pm.t[(j, j)]).collect())
}

struct Replicate {
    outcomes: Vec<Outcome>,
    fmi: Option<Vec<f64>>,
}

pub fn run_monotone_study(grid: &MonotoneGrid, replicates: usize, seed: u64) -> Result<Vec<Record>> {
    let model = MvnModel::new(grid.p, MeanNull::ZeroMean)?;
    let slots_ = slots(&grid.methods, &[Param::I]);
    let mut points = Vec::new();
    for &m in &grid.m {
        for &[a0, a1] in &grid.mechanisms {
            for &delta in &grid.delta {
                points.push((m, a0, a1, delta));
            }
        }
    }
    let jobs: Vec<(usize, usize)> = (0..points.len()).flat_map(|g| (0..replicates).map(move |r| (g, r))).collect();
    let results: Vec<Result<Replicate>> = jobs
        .par_iter()
        .map(|&(g, rep)| {
            let (m, a0, a1, delta) = points[g];
            let cfg = MonotoneConfig { n: grid.n, p: grid.p, delta, alpha0: a0, alpha1: a1 };
            let mut last = None;
            for attempt in 0..MAX_ATTEMPTS {
                let key = [STUDY_KEY, m as u64, a0.to_bits(), a1.to_bits(), delta.to_bits(), rep as u64, attempt];
                let mut rng = RngStream::keyed(seed, &key);
                let drawn = generate_monotone_data(&cfg, &mut rng)
                    .and_then(|d| impute_monotone_regression(&d.observed, m, &mut rng).map(|done| (d, done)));
                match drawn {
                    Ok((d, done)) => {
                        let outcomes = run_slots(&model, &done, Some(&d.complete), &slots_, None);
                        return Ok(Replicate { outcomes, fmi: mean_fmi(&model, &done).ok() });
                    }
                    Err(e) => last = Some(e),
                }
            }
            Err(last.expect("at least one attempt"))
        })
        .collect();
    let mut records = Vec::new();
    let mut it = results.into_iter();
    for &(m, a0, a1, delta) in &points {
        let coords = vec![
            ("n".to_string(), grid.n as f64),
            ("p".to_string(), grid.p as f64),
            ("m".to_string(), m as f64),
            ("alpha0".to_string(), a0),
            ("alpha1".to_string(), a1),
            ("delta".to_string(), delta),
        ];
        let mut outcomes = Vec::with_capacity(replicates);
        let mut fmis: Vec<Vec<f64>> = Vec::new();
        for _ in 0..replicates {
            let r = it.next().expect("one result per job")?;
            outcomes.push(r.outcomes);
            fmis.extend(r.fmi);
        }
        records.extend(summarize(&coords, &slots_, &outcomes, &grid.alpha, Wanted { reject: true, ..Default::default() }, None));
        for j in 0..grid.p {
            let v: Vec<f64> = fmis.iter().map(|f| f[j]).collect();
            let (value, mc_se) = mean_se(&v);
            records.push(Record {
                point: coords.clone(),
                method: "-".into(),
                param: "-".into(),
                metric: format!("fmi_x{}", j + 1),
                value,
                mc_se,
                count: v.len(),
            });
        }
    }
    Ok(records)
}

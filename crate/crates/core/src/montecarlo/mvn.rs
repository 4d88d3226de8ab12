use rayon::prelude::*;

use super::record::{mean_se, rate, Record};
use super::spec::{Benchmark, MvnGrid, Procedure};
use crate::combine::{run_test, Method, NullApprox, TestOptions};
use crate::error::{Error, Result};
use crate::imputers::{generate_mvn_experiment_data, impute_mvn_jeffreys, CompletedDatasets, MvnConfig};
use crate::models::{LikelihoodModel, MeanNull, MvnModel, Param};
use crate::numkit::{Continuous, Df2, FDist, Matrix, RngStream};

/// Give up on a replicate after this many failed draws.
pub const MAX_ATTEMPTS: u64 = 20;

/// Which summaries a study reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MvnDesign {
    Size,
    Power,
    FmiMse,
    NegativeProportions,
}

const STUDY_KEY: u64 = 2;

/// A procedure under one parametrization. Parametrization-invariant
/// procedures appear once with `param = None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Slot {
    pub proc: Procedure,
    pub param: Option<Param>,
}

impl Slot {
    fn param_label(&self) -> String {
        self.param.map_or_else(|| "-".to_string(), |p| p.label().to_string())
    }
}

pub(crate) fn depends_on_param(p: Procedure) -> bool {
    matches!(p, Procedure::Test(m) if m.is_wald() || matches!(m, Method::L1 | Method::L2))
}

pub(crate) fn slots(methods: &[Procedure], params: &[Param]) -> Vec<Slot> {
    let mut out = Vec::new();
    for &proc in methods {
        if depends_on_param(proc) {
            out.extend(params.iter().map(|&p| Slot { proc, param: Some(p) }));
        } else {
            out.push(Slot { proc, param: None });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Outcome {
    Done { statistic: f64, p_value: f64, r_hat: Option<f64>, negative_r: bool },
    Dropped,
}

/// Complete-data style benchmark: the LRT on `x` against χ²_k/k.
pub(crate) fn benchmark<M: LikelihoodModel>(model: &M, x: &M::Data) -> Result<Outcome> {
    let k = model.k() as f64;
    let statistic = model.lrt_stat(x)? / k;
    let p_value = FDist::new(k, Df2::Infinite)?.sf(statistic);
    Ok(Outcome::Done { statistic, p_value, r_hat: None, negative_r: false })
}

pub(crate) fn run_slots<M: LikelihoodModel>(
    model: &M,
    done: &CompletedDatasets<M::Data>,
    complete: Option<&M::Data>,
    slots: &[Slot],
    approx: Option<NullApprox>,
) -> Vec<Outcome> {
    slots
        .iter()
        .map(|s| {
            let res = match s.proc {
                Procedure::Test(method) => {
                    let opts = TestOptions { null_approx: approx, param: s.param.unwrap_or(Param::I) };
                    run_test(method, model, done, &opts).map(|t| Outcome::Done {
                        statistic: t.statistic,
                        p_value: t.p_value,
                        r_hat: t.r_hat.map(|e| e.r_hat),
                        negative_r: t.r_hat.is_some_and(|e| e.negative),
                    })
                }
                Procedure::Benchmark(Benchmark::C1) => match complete {
                    Some(x) => benchmark(model, x),
                    None => Err(Error::InvalidArgument("no complete data".into())),
                },
                Procedure::Benchmark(Benchmark::C2) => match &done.observed {
                    Some(o) => model.complete_cases(o).and_then(|x| benchmark(model, &x)),
                    None => Err(Error::InvalidArgument("no observed data".into())),
                },
            };
            res.unwrap_or(Outcome::Dropped)
        })
        .collect()
}

/// Summaries over replicates for one grid point.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Wanted {
    pub reject: bool,
    pub fmi: bool,
    pub negatives: bool,
}

pub(crate) fn summarize(
    point: &[(String, f64)],
    slots: &[Slot],
    outcomes: &[Vec<Outcome>],
    alphas: &[f64],
    want: Wanted,
    f_truth: Option<f64>,
) -> Vec<Record> {
    let mut out = Vec::new();
    for (si, slot) in slots.iter().enumerate() {
        let done: Vec<(f64, f64, Option<f64>, bool)> = outcomes
            .iter()
            .filter_map(|o| match o[si] {
                Outcome::Done { statistic, p_value, r_hat, negative_r } => Some((statistic, p_value, r_hat, negative_r)),
                Outcome::Dropped => None,
            })
            .collect();
        let n = done.len();
        let rec = |extra: Option<(&str, f64)>, metric: &str, value: f64, mc_se: f64, count: usize| {
            let mut pt = point.to_vec();
            if let Some((k, v)) = extra {
                pt.push((k.to_string(), v));
            }
            Record {
                point: pt,
                method: slot.proc.to_string(),
                param: slot.param_label(),
                metric: metric.to_string(),
                value,
                mc_se,
                count,
            }
        };
        if want.reject {
            for &a in alphas {
                let (v, se) = rate(done.iter().filter(|d| d.1 < a).count(), n);
                out.push(rec(Some(("alpha", a)), "reject", v, se, n));
            }
        }
        if want.negatives {
            let (v, se) = rate(done.iter().filter(|d| d.3).count(), n);
            out.push(rec(None, "neg_r", v, se, n));
            let (v, se) = rate(done.iter().filter(|d| d.0 < 0.0).count(), n);
            out.push(rec(None, "neg_stat", v, se, n));
        }
        if want.fmi {
            let fhat: Vec<f64> = done.iter().filter_map(|d| d.2).map(|r| r / (1.0 + r)).collect();
            if !fhat.is_empty() {
                let (v, se) = mean_se(&fhat);
                out.push(rec(None, "mean_fhat", v, se, fhat.len()));
                if let Some(f) = f_truth {
                    let sq: Vec<f64> = fhat.iter().map(|x| (x - f).powi(2)).collect();
                    let (v, se) = mean_se(&sq);
                    out.push(rec(None, "mse_fhat", v, se, sq.len()));
                }
            }
        }
        let dropped = outcomes.len() - n;
        if dropped > 0 || matches!(slot.proc, Procedure::Test(m) if m.is_wald()) {
            out.push(rec(None, "dropped", dropped as f64, 0.0, outcomes.len()));
        }
    }
    out
}

/// Grid point of an MVN study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvnPoint {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub rho: f64,
    pub f: f64,
    pub delta: f64,
}

impl MvnPoint {
    pub fn config(&self, design: MvnDesign, sigma2: f64) -> MvnConfig {
        let mu = match design {
            MvnDesign::Size | MvnDesign::NegativeProportions => vec![1.0; self.p],
            _ => (0..self.p).map(|j| -2.0 + (j + 1) as f64 * self.delta).collect(),
        };
        MvnConfig { n: self.n, p: self.p, rho: self.rho, sigma2, f: self.f, mu }
    }

    fn key(&self) -> [u64; 6] {
        [self.n as u64, self.m as u64, self.p as u64, self.rho.to_bits(), self.f.to_bits(), self.delta.to_bits()]
    }

    fn coords(&self) -> Vec<(String, f64)> {
        vec![
            ("n".into(), self.n as f64),
            ("m".into(), self.m as f64),
            ("p".into(), self.p as f64),
            ("rho".into(), self.rho),
            ("f".into(), self.f),
            ("delta".into(), self.delta),
        ]
    }

    /// f_m = r_m / (1 + r_m) with r_m = (1 + 1/m) n_mis / n_obs.
    pub fn f_m(&self, n_obs: usize) -> f64 {
        let r = (self.n - n_obs) as f64 / n_obs as f64;
        let r_m = (1.0 + 1.0 / self.m as f64) * r;
        r_m / (1.0 + r_m)
    }
}

/// Draw, impute and test one replicate, redrawing on generator or imputer failure.
/// Returns the outcomes and the number of redraws.
pub(crate) fn mvn_replicate(
    point: &MvnPoint,
    cfg: &MvnConfig,
    seed: u64,
    rep: usize,
    slots_: &[Slot],
    approx: Option<NullApprox>,
) -> Result<(Vec<Outcome>, u64)> {
    let model = MvnModel::new(point.p, MeanNull::CommonMean)?;
    let mut last = None;
    for attempt in 0..MAX_ATTEMPTS {
        let mut key = vec![STUDY_KEY];
        key.extend(point.key());
        key.extend([rep as u64, attempt]);
        let mut rng = RngStream::keyed(seed, &key);
        let done = generate_mvn_experiment_data(cfg, &mut rng).and_then(|(x, _)| impute_mvn_jeffreys(&x, point.m, &mut rng));
        match done {
            Ok(done) => return Ok((run_slots(&model, &done, None::<&Matrix>, slots_, approx), attempt)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

pub fn run_mvn_study(grid: &MvnGrid, design: MvnDesign, replicates: usize, seed: u64) -> Result<Vec<Record>> {
    let mut points = Vec::new();
    let deltas = if design == MvnDesign::Size { vec![0.0] } else { grid.delta.clone() };
    for &n in &grid.n {
        for &m in &grid.m {
            for &p in &grid.p {
                for &rho in &grid.rho {
                    for &f in &grid.f {
                        for &delta in &deltas {
                            points.push(MvnPoint { n, m, p, rho, f, delta });
                        }
                    }
                }
            }
        }
    }
    let slots_ = slots(&grid.methods, &grid.params);
    let jobs: Vec<(usize, usize)> = (0..points.len()).flat_map(|g| (0..replicates).map(move |r| (g, r))).collect();
    let results: Vec<Result<(Vec<Outcome>, u64)>> = jobs
        .par_iter()
        .map(|&(g, r)| {
            let pt = &points[g];
            mvn_replicate(pt, &pt.config(design, grid.sigma2), seed, r, &slots_, grid.null_approx)
        })
        .collect();
    let want = match design {
        MvnDesign::Size | MvnDesign::Power => Wanted { reject: true, ..Default::default() },
        MvnDesign::FmiMse => Wanted { fmi: true, ..Default::default() },
        MvnDesign::NegativeProportions => Wanted { negatives: true, ..Default::default() },
    };
    let mut records = Vec::new();
    let mut it = results.into_iter();
    for pt in &points {
        let mut outcomes = Vec::with_capacity(replicates);
        let mut redraws = 0;
        for _ in 0..replicates {
            let (o, a) = it.next().expect("one result per job")?;
            outcomes.push(o);
            redraws += a;
        }
        let cfg = pt.config(design, grid.sigma2);
        let truth = Some(pt.f_m(cfg.n_obs()));
        records.extend(summarize(&pt.coords(), &slots_, &outcomes, &grid.alpha, want, truth));
        if redraws > 0 {
            records.push(Record {
                point: pt.coords(),
                method: "-".into(),
                param: "-".into(),
                metric: "redrawn".into(),
                value: redraws as f64,
                mc_se: 0.0,
                count: replicates,
            });
        }
    }
    if design == MvnDesign::Power {
        add_odds(&mut records);
    }
    Ok(records)
}

/// Power divided by the empirical size at δ = 0 with the other coordinates fixed.
fn add_odds(records: &mut Vec<Record>) {
    let base: Vec<Record> = records.iter().filter(|r| r.metric == "reject" && r.get("delta") == Some(0.0)).cloned().collect();
    let same = |a: &Record, b: &Record| {
        a.method == b.method
            && a.param == b.param
            && a.point.iter().filter(|(k, _)| k != "delta").all(|(k, v)| b.get(k) == Some(*v))
    };
    let mut extra = Vec::new();
    for r in records.iter().filter(|r| r.metric == "reject") {
        if let Some(b) = base.iter().find(|b| same(r, b)) {
            if b.value > 0.0 {
                let value = r.value / b.value;
                let mc_se = ((r.mc_se / b.value).powi(2) + (r.value * b.mc_se / (b.value * b.value)).powi(2)).sqrt();
                extra.push(Record { metric: "odds".into(), value, mc_se, ..r.clone() });
            }
        }
    }
    records.extend(extra);
}

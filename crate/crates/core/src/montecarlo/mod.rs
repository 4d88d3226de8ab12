//! Simulation studies.
//!
//! Every replicate draws from its own stream, keyed by the grid coordinates
//! and the replicate index, and results are merged in grid order, so the
//! output does not depend on the number of threads.

pub mod ar1;
pub mod monotone;
pub mod mvn;
pub mod nulldist;
pub mod record;
pub mod spec;
pub mod svg;

pub use ar1::{ar1_conditional_imputations, ar1_series, ar1_stack_gap, Ar1Gap};
pub use monotone::{mean_fmi, run_monotone_study};
pub use mvn::{run_mvn_study, MvnDesign, MvnPoint};
pub use nulldist::run_nulldist_study;
pub use record::{mean_se, rate, ExperimentResult, Record};
pub use spec::{Benchmark, ExperimentSpec, MonotoneGrid, MvnGrid, NulldistGrid, OutputSpec, Procedure, SpecError, Study};

use crate::error::{Error, Result};

/// Run a study on `threads` workers, or on rayon's global pool when `None`.
pub fn run_experiment(spec: &ExperimentSpec, threads: Option<usize>) -> Result<ExperimentResult> {
    spec.validate().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let go = || -> Result<Vec<Record>> {
        let (r, seed) = (spec.replicates, spec.seed);
        match &spec.study {
            Study::Nulldist(g) => run_nulldist_study(g, r, seed),
            Study::Size(g) => run_mvn_study(g, MvnDesign::Size, r, seed),
            Study::Power(g) => run_mvn_study(g, MvnDesign::Power, r, seed),
            Study::FmiMse(g) => run_mvn_study(g, MvnDesign::FmiMse, r, seed),
            Study::NegativeProportions(g) => run_mvn_study(g, MvnDesign::NegativeProportions, r, seed),
            Study::MonotoneMcarMar(g) => run_monotone_study(g, r, seed),
        }
    };
    let records = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(go)?,
        None => go()?,
    };
    Ok(ExperimentResult { experiment: spec.study.tag().into(), seed: spec.seed, replicates: spec.replicates, records })
}

/// Charts suited to a study's result, as (name, SVG document) pairs.
pub fn charts(result: &ExperimentResult) -> Vec<(String, String)> {
    let wanted: &[(&str, &str)] = match result.experiment.as_str() {
        "nulldist" => &[("f_m", "alpha_hat"), ("f_m", "alpha_tilde")],
        "size" => &[("rho", "reject")],
        "power" => &[("delta", "reject"), ("delta", "odds")],
        "fmi_mse" => &[("delta", "mse_fhat")],
        "negative_proportions" => &[("f", "neg_stat"), ("f", "neg_r")],
        "monotone_mcar_mar" => &[("delta", "reject")],
        _ => &[],
    };
    wanted
        .iter()
        .filter_map(|(x, metric)| {
            let title = format!("{} {metric}", result.experiment);
            svg::line_chart(&result.records, x, metric, &title).map(|s| (format!("{}_{metric}", result.experiment), s))
        })
        .collect()
}

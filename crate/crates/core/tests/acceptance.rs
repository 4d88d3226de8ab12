//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `cargo test -p milrt --test acceptance` runs everything; pass criterion
//! numbers as arguments to run a subset. Criteria in `KNOWN_FAILURES` still
//! print FAIL but do not fail the run.

mod common;

use std::time::{Duration, Instant};

use common::{ar1_instance, mvn_instance, stacked_via, table_instance};
use milrt::combine::{averaged_lrt, odds_from_gap, per_dataset, r_perturbation, run_test, stacked_lrt, Method, TestOptions};
use milrt::imputers::{impute_multinomial_dirichlet, PartialTable};
use milrt::models::{Ar1Model, LikelihoodModel, MultinomialModel, Param, TableNull};
use milrt::montecarlo::{ar1_stack_gap, run_experiment, ExperimentResult, ExperimentSpec};
use milrt::numkit::sample::{chi_square, dirichlet, gamma, mvn, wishart};
use milrt::numkit::{cholesky, ChiSquared, Continuous, Df2, FDist, Matrix, RngStream};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn spec(json: &str) -> ExperimentSpec {
    ExperimentSpec::from_json(json).unwrap_or_else(|e| panic!("bad spec: {e}"))
}

fn value(res: &ExperimentResult, metric: &str, method: &str, param: &str, at: &[(&str, f64)]) -> (f64, f64) {
    let r = res
        .select(metric, method, at)
        .find(|r| r.param == param)
        .unwrap_or_else(|| panic!("no {metric} record for {method} ({param}) at {at:?}"));
    (r.value, r.mc_se)
}

// 1. Non-negativity over random instances, and ψ-map invariance of the stacked tests.
fn nonnegativity() -> Verdict {
    const N: u64 = 500;
    let mut violations = Vec::new();
    let mut check = |what: &str, i: u64, v: f64| {
        if !(v >= 0.0) {
            violations.push(format!("{what}#{i}={v:e}"));
        }
    };
    let mut worst_invariance: f64 = 0.0;
    for i in 0..N {
        let (model, done) = mvn_instance(101, i);
        let xs = &done.datasets;
        let (pd, a, s) = (per_dataset(&model, xs).unwrap(), averaged_lrt(&model, xs).unwrap(), stacked_lrt(&model, xs).unwrap());
        check("mvn d_L", i, a.d_hat);
        check("mvn d_S", i, s.d_hat);
        check("mvn r_rob", i, odds_from_gap(pd.delta_bar - s.delta_hat, model.h(), xs.len()).unwrap());
        check("mvn r_pert", i, r_perturbation(&model, xs).unwrap().0.r_hat);

        let (model, done) = table_instance(102, i);
        let xs = &done.datasets;
        let (pd, a, s) = (per_dataset(&model, xs).unwrap(), averaged_lrt(&model, xs).unwrap(), stacked_lrt(&model, xs).unwrap());
        check("table d_L", i, a.d_hat);
        check("table d_S", i, s.d_hat);
        check("table r_rob", i, odds_from_gap(pd.delta_bar - s.delta_hat, model.h(), xs.len()).unwrap());
        if let Ok((r, _)) = r_perturbation(&model, xs) {
            check("table r_pert", i, r.r_hat);
        }
        let plus = run_test(Method::L4, &model, &done, &TestOptions::default()).unwrap().statistic;
        let rob = run_test(Method::L5, &model, &done, &TestOptions::default()).unwrap().statistic;
        let k = model.k() as f64;
        for map in Param::ALL {
            let (d, delta) = stacked_via(&model, xs, map);
            let r_plus = odds_from_gap(pd.d_bar - d, model.k(), xs.len()).unwrap().max(0.0);
            let r_rob = odds_from_gap(pd.delta_bar - delta, model.h(), xs.len()).unwrap();
            worst_invariance = worst_invariance
                .max((d / (k * (1.0 + r_plus)) - plus).abs())
                .max((d / (k * (1.0 + r_rob)) - rob).abs());
        }

        let xs = ar1_instance(103, i, 40 + (i as usize % 5) * 40);
        let pd = per_dataset(&Ar1Model, &xs).unwrap();
        let a = averaged_lrt(&Ar1Model, &xs).unwrap();
        check("ar1 d_L", i, a.d_hat);
        check("ar1 d_S", i, stacked_lrt(&Ar1Model, &xs).unwrap().d_hat);
        check("ar1 r_rob", i, odds_from_gap(pd.delta_bar - a.delta_hat, Ar1Model.h(), xs.len()).unwrap());
        if let Ok((r, _)) = r_perturbation(&Ar1Model, &xs) {
            check("ar1 r_pert", i, r.r_hat);
        }
    }
    let pass = violations.is_empty() && worst_invariance <= 1e-8;
    verdict(
        pass,
        format!("{N} instances per model, {} violations {:?}; max ψ-map discrepancy {worst_invariance:.1e} (≤ 1e-8)", violations.len(), violations.iter().take(3).collect::<Vec<_>>()),
    )
}

// 2. Stacking against averaging.
fn equivalence() -> Verdict {
    let gap = |d: f64, r: f64, acc: &mut (f64, f64)| {
        acc.0 = acc.0.max(d);
        acc.1 = acc.1.max(r);
    };
    let mut worst = (0.0, 0.0);
    for i in 0..100 {
        for (d, r) in [gaps_mvn(i), gaps_table(i)] {
            gap(d, r, &mut worst);
        }
    }
    // Under the null; away from it d grows like n and the absolute gap stays O(1).
    let medians: Vec<(f64, f64)> = [50, 200, 800]
        .iter()
        .map(|&n| {
            let g = ar1_stack_gap(n, 5, 0.0, 400, 9).unwrap();
            let med = |mut v: Vec<f64>| {
                v.sort_by(f64::total_cmp);
                v[v.len() / 2]
            };
            (med(g.iter().map(|g| g.d).collect()), med(g.iter().map(|g| g.r).collect()))
        })
        .collect();
    let shrinking = medians.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1);
    let pass = worst.0 <= 1e-8 && worst.1 <= 1e-8 && shrinking;
    let shown: Vec<String> = medians.iter().map(|(d, r)| format!("{d:.2e}/{r:.2e}")).collect();
    verdict(
        pass,
        format!(
            "max |d_S − d_L| = {:.1e}, max |r_S − r_L| = {:.1e} (≤ 1e-8); AR(1) median d/r gaps at n=50, 200, 800: {}",
            worst.0,
            worst.1,
            shown.join(", ")
        ),
    )
}

fn gaps_of<M: LikelihoodModel>(model: &M, xs: &[M::Data]) -> (f64, f64) {
    let pd = per_dataset(model, xs).unwrap();
    let s = stacked_lrt(model, xs).unwrap();
    let a = averaged_lrt(model, xs).unwrap();
    let (k, m) = (model.k(), xs.len());
    let rs = odds_from_gap(pd.d_bar - s.d_hat, k, m).unwrap();
    let rl = odds_from_gap(pd.d_bar - a.d_hat, k, m).unwrap();
    ((s.d_hat - a.d_hat).abs(), (rs - rl).abs())
}

fn gaps_mvn(i: u64) -> (f64, f64) {
    let (model, done) = mvn_instance(201, i);
    gaps_of(&model, &done.datasets)
}

fn gaps_table(i: u64) -> (f64, f64) {
    let (model, done) = table_instance(202, i);
    gaps_of(&model, &done.datasets)
}

// 3. Tail rates of the limiting null statistic.
fn null_approximation() -> Verdict {
    let res = run_experiment(
        &spec(r#"{"seed":3,"replicates":65536,"study":{"experiment":"nulldist","m":[3],"k":[1,2],"tau":[1,2],"f_m":[0.1,0.2,0.3],"alpha":[0.05]}}"#),
        None,
    )
    .unwrap();
    let mut pass = true;
    let mut worst_hat: f64 = 0.0;
    let mut worst_margin = f64::NEG_INFINITY;
    for r in res.records.iter().filter(|r| r.metric == "alpha_hat") {
        let at: Vec<(&str, f64)> = r.point.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        let tilde = res.select("alpha_tilde", "-", &at).next().unwrap().value;
        let (e_hat, e_tilde) = ((r.value - 0.05).abs(), (tilde - 0.05).abs());
        worst_hat = worst_hat.max(e_hat);
        worst_margin = worst_margin.max(e_hat - e_tilde);
        pass &= e_hat < 0.01 && e_hat <= e_tilde + 0.005;
    }
    verdict(pass, format!("12 points, 2^16 draws: max |α̂ − 0.05| = {worst_hat:.4} (< 0.01); max |α̂ − α| − |α̃ − α| = {worst_margin:+.4} (≤ 0.005)"))
}

// 4. Size of L-5.
fn size() -> Verdict {
    let res = run_experiment(
        &spec(r#"{"seed":4,"replicates":1024,"study":{"experiment":"size","n":[100],"m":[3],"p":[2],"rho":[0.4],"f":[0.5],"methods":["L-5"],"alpha":[0.005,0.05]}}"#),
        None,
    )
    .unwrap();
    let (a5, _) = value(&res, "reject", "L-5", "-", &[("alpha", 0.05)]);
    let (a05, _) = value(&res, "reject", "L-5", "-", &[("alpha", 0.005)]);
    let pass = (0.035..=0.065).contains(&a5) && (0.002..=0.012).contains(&a05);
    verdict(pass, format!("L-5 size {:.2}% at 5% (in [3.5, 6.5]), {:.2}% at 0.5% (in [0.2, 1.2])", 100.0 * a5, 100.0 * a05))
}

// 5. Negative legacy statistics. The criterion names the lightest
// missingness (f = 0.1); the whole f sweep is printed because the reference
// percentages line up with it in the opposite order (see the README).
fn negatives() -> Verdict {
    let res = run_experiment(
        &spec(r#"{"seed":5,"replicates":1024,"study":{"experiment":"negative_proportions","n":[100],"m":[3],"p":[2],"rho":[0.4],"f":[0.1,0.3,0.5,0.7,0.9],"methods":["L-1","L-3"],"params":["ii"]}}"#),
        None,
    )
    .unwrap();
    let sweep: Vec<String> = [0.1, 0.3, 0.5, 0.7, 0.9]
        .iter()
        .map(|&f| format!("{f}: {:.1}%", 100.0 * value(&res, "neg_stat", "L-1", "ii", &[("f", f)]).0))
        .collect();
    let (neg_d, se) = value(&res, "neg_stat", "L-1", "ii", &[("f", 0.1)]);
    let count_rs: f64 = res.select("neg_r", "L-3", &[]).map(|r| (r.value * r.count as f64).round()).sum();
    let pass = (0.45..=0.65).contains(&neg_d) && count_rs == 0.0;
    verdict(
        pass,
        format!(
            "%(D̃_L < 0) at f = 0.1 = {:.1}% ± {:.1} (in [45, 65]); negative r̂_S over all f: {count_rs}; by f: [{}]",
            100.0 * neg_d,
            100.0 * se,
            sweep.join(", ")
        ),
    )
}

// 6. Power curves.
fn power() -> Verdict {
    let res = run_experiment(
        &spec(r#"{"seed":6,"replicates":512,"study":{"experiment":"power","n":[100],"m":[10],"rho":[0.8],"delta":[0,1,2,3,4],"methods":["L-5","W-1"],"params":["ii"],"alpha":[0.005]}}"#),
        None,
    )
    .unwrap();
    let curve: Vec<(f64, f64)> = [0.0, 1.0, 2.0, 3.0, 4.0].iter().map(|&d| value(&res, "reject", "L-5", "-", &[("delta", d)])).collect();
    let monotone = curve.windows(2).all(|w| w[1].0 >= w[0].0 - 2.0 * (w[0].1.powi(2) + w[1].1.powi(2)).sqrt());
    let dip = [1.0, 2.0].iter().map(|&d| value(&res, "reject", "W-1", "ii", &[("delta", d)]).0).fold(f64::INFINITY, f64::min);
    let pass = monotone && curve[4].0 >= 0.9 && dip < 0.1;
    let shown: Vec<String> = curve.iter().map(|c| format!("{:.3}", c.0)).collect();
    verdict(pass, format!("L-5 power over δ=0..4: [{}] (nondecreasing, ≥ 0.9 at 4); W-1 min power on [1, 2]: {dip:.3} (< 0.1)", shown.join(", ")))
}

// 7. Care-survival data.
fn care_survival() -> Verdict {
    let table = PartialTable::care_survival();
    let full = MultinomialModel::new([2, 2, 2], TableNull::Mutual).unwrap();
    let cond = MultinomialModel::new([2, 2, 2], TableNull::Conditional { given: 0 }).unwrap();
    let (mut d, mut p_full, mut p_cond, mut neg) = (0.0, 0.0_f64, 0.0, 0);
    let seeds = 20;
    for seed in 0..seeds {
        let done = impute_multinomial_dirichlet(&table, 50, &mut RngStream::new(700 + seed, 0)).unwrap();
        let rob = run_test(Method::L5, &full, &done, &TestOptions::default()).unwrap();
        d += rob.statistic / seeds as f64;
        p_full = p_full.max(rob.p_value);
        p_cond += run_test(Method::L5, &cond, &done, &TestOptions::default()).unwrap().p_value / seeds as f64;
        let legacy = run_test(Method::L1, &full, &done, &TestOptions { null_approx: None, param: Param::Iii }).unwrap();
        neg += usize::from(legacy.r_hat.unwrap().r_hat < 0.0);
    }
    let pass = (35.0..=60.0).contains(&d) && p_full < 1e-6 && (0.75..=0.99).contains(&p_cond) && 2 * neg >= seeds as usize;
    verdict(
        pass,
        format!("full independence D̂◇ = {d:.1} (in [35, 60]), max p = {p_full:.1e}; conditional p = {p_cond:.3} (in [0.75, 0.99]); r̃_L (iii) < 0 in {neg}/{seeds} seeds"),
    )
}

// 8. FMI estimation.
fn fmi() -> Verdict {
    let res = run_experiment(
        &spec(r#"{"seed":8,"replicates":200,"study":{"experiment":"fmi_mse","n":[1600],"m":[30],"rho":[0.8],"f":[0.5],"delta":[0,4],"methods":["L-5","L-1"],"params":["ii"]}}"#),
        None,
    )
    .unwrap();
    let r_m = 1.0 + 1.0 / 30.0;
    let f_m = r_m / (1.0 + r_m);
    let means: Vec<f64> = [0.0, 4.0].iter().map(|&d| value(&res, "mean_fhat", "L-5", "-", &[("delta", d)]).0).collect();
    let (mse_rob, _) = value(&res, "mse_fhat", "L-5", "-", &[("delta", 4.0)]);
    let (mse_legacy, _) = value(&res, "mse_fhat", "L-1", "ii", &[("delta", 4.0)]);
    let pass = means.iter().all(|m| (m - f_m).abs() <= 0.05) && mse_rob < mse_legacy;
    verdict(
        pass,
        format!("f_m = {f_m:.4}; mean f̂◇ = {:.4} (δ=0), {:.4} (δ=4); MSE at δ=4: f̂◇ {mse_rob:.2e} < f̃_L {mse_legacy:.2e}", means[0], means[1]),
    )
}

// 9. Numerical substrate.
fn numkit() -> Verdict {
    use statrs::distribution::{ChiSquared as RefChi, ContinuousCDF, FisherSnedecor};
    let mut worst_round: f64 = 0.0;
    let mut worst_ref: f64 = 0.0;
    let qs = [1e-6, 0.001, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 0.999];
    for &d1 in &[1.0, 2.0, 3.0, 7.5, 20.0] {
        for &d2 in &[2.5, 4.0, 10.0, 40.0, 300.0, 5000.0] {
            let f = FDist::new(d1, Df2::Finite(d2)).unwrap();
            let reference = FisherSnedecor::new(d1, d2).unwrap();
            for &q in &qs {
                let x = f.quantile(q).unwrap();
                worst_round = worst_round.max((f.cdf(x) - q).abs());
                worst_ref = worst_ref.max((f.cdf(x) - reference.cdf(x)).abs());
            }
        }
        let c = ChiSquared::new(d1).unwrap();
        let reference = RefChi::new(d1).unwrap();
        for &q in &qs {
            let x = c.quantile(q).unwrap();
            worst_round = worst_round.max((c.cdf(x) - q).abs());
            worst_ref = worst_ref.max((c.cdf(x) - reference.cdf(x)).abs());
        }
    }

    // Sampler moments, each a z-score against its Monte Carlo standard error.
    let mut rng = RngStream::new(9, 0);
    let n = 20000;
    let z = |draws: &[f64], mean: f64| {
        let nn = draws.len() as f64;
        let m = draws.iter().sum::<f64>() / nn;
        let v = draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (nn - 1.0);
        (m - mean) / (v / nn).sqrt()
    };
    let mut zs = Vec::new();
    for shape in [0.3, 1.0, 4.5] {
        let g: Vec<f64> = (0..n).map(|_| gamma(shape, &mut rng).unwrap()).collect();
        zs.push(("gamma", z(&g, shape)));
    }
    let c: Vec<f64> = (0..n).map(|_| chi_square(3.0, &mut rng).unwrap()).collect();
    zs.push(("chi_square", z(&c, 3.0)));
    let dirs: Vec<Vec<f64>> = (0..n).map(|_| dirichlet(&[0.5, 2.0, 3.5], &mut rng).unwrap()).collect();
    for (j, want) in [0.5 / 6.0, 2.0 / 6.0, 3.5 / 6.0].iter().enumerate() {
        zs.push(("dirichlet", z(&dirs.iter().map(|d| d[j]).collect::<Vec<_>>(), *want)));
    }
    let sigma = Matrix::from_rows(&[vec![2.0, 0.6], vec![0.6, 1.0]]).unwrap();
    let chol = cholesky(&sigma).unwrap();
    let xs: Vec<Vec<f64>> = (0..n).map(|_| mvn(&[1.0, -1.0], &chol, &mut rng)).collect();
    zs.push(("mvn mean", z(&xs.iter().map(|x| x[0]).collect::<Vec<_>>(), 1.0)));
    zs.push(("mvn cross", z(&xs.iter().map(|x| (x[0] - 1.0) * (x[1] + 1.0)).collect::<Vec<_>>(), 0.6)));
    let ws: Vec<Matrix> = (0..5000).map(|_| wishart(6.0, &chol, &mut rng).unwrap()).collect();
    for (a, b) in [(0, 0), (0, 1), (1, 1)] {
        zs.push(("wishart", z(&ws.iter().map(|w| w[(a, b)]).collect::<Vec<_>>(), 6.0 * sigma[(a, b)])));
    }
    let worst_z = zs.iter().fold(("", 0.0_f64), |acc, &(name, v)| if v.abs() > acc.1 { (name, v.abs()) } else { acc });

    let det = spec(r#"{"seed":10,"replicates":64,"study":{"experiment":"size","n":[100],"m":[3],"p":[2,3],"rho":[0.4],"f":[0.3,0.5],"methods":["L-5","L-1","W-1"],"params":["i","ii"]}}"#);
    let runs: Vec<ExperimentResult> = [1, 3, 8].iter().map(|&t| run_experiment(&det, Some(t)).unwrap()).collect();
    let deterministic = runs.windows(2).all(|w| w[0] == w[1]);

    let pass = worst_round <= 1e-10 && worst_ref <= 1e-9 && worst_z.1 <= 5.0 && deterministic;
    verdict(
        pass,
        format!(
            "cdf(quantile(q)) error {worst_round:.1e} (≤ 1e-10), vs reference {worst_ref:.1e}; worst sampler |z| = {:.2} ({}) (≤ 5); identical results on 1/3/8 threads: {deterministic}",
            worst_z.1, worst_z.0
        ),
    )
}

/// Criteria that fail as specified and are documented as such. Any other
/// failure exits nonzero.
const KNOWN_FAILURES: [u32; 1] = [5];

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Verdict); 9] = [
        (1, "non-negativity and invariance", Duration::from_secs(60), nonnegativity),
        (2, "stacked/averaged equivalence", Duration::from_secs(120), equivalence),
        (3, "null approximation", Duration::from_secs(120), null_approximation),
        (4, "size", Duration::from_secs(600), size),
        (5, "negative legacy values", Duration::from_secs(600), negatives),
        (6, "power", Duration::from_secs(900), power),
        (7, "care-survival", Duration::from_secs(120), care_survival),
        (8, "FMI estimation", Duration::from_secs(600), fmi),
        (9, "numerical substrate", Duration::from_secs(60), numkit),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut known = 0;
    for (id, name, budget, run) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let v = run();
        let took = t.elapsed();
        let pass = v.pass && took <= budget;
        let expected = KNOWN_FAILURES.contains(&id);
        match (pass, expected) {
            (false, true) => known += 1,
            (false, false) => failed += 1,
            _ => {}
        }
        println!(
            "{} criterion {id} ({name}): {} [{:.1}s of {}s]{}",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            took.as_secs_f64(),
            budget.as_secs(),
            if expected { " (known failure, see README)" } else { "" }
        );
    }
    if known > 0 {
        println!("{known} known failure(s)");
    }
    if failed > 0 {
        println!("{failed} criteria failed unexpectedly");
        std::process::exit(1);
    }
}

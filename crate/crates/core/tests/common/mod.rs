#![allow(dead_code)]

use milrt::imputers::{generate_mvn_experiment_data, impute_multinomial_dirichlet, impute_mvn_jeffreys, CompletedDatasets, MvnConfig, PartialTable};
use milrt::models::{CountTable, LikelihoodModel, MeanNull, MultinomialModel, MvnModel, TableNull};
use milrt::montecarlo::{ar1_conditional_imputations, ar1_series};
use milrt::numkit::sample::uniform;
use milrt::numkit::{Matrix, RngStream};

pub fn pick(rng: &mut RngStream, lo: usize, hi: usize) -> usize {
    lo + ((hi - lo + 1) as f64 * uniform(rng)).floor().min((hi - lo) as f64) as usize
}

pub fn between(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

/// A random common-mean problem with imputed missing rows.
pub fn mvn_instance(seed: u64, i: u64) -> (MvnModel, CompletedDatasets<Matrix>) {
    let mut rng = RngStream::keyed(seed, &[i]);
    loop {
        let p = pick(&mut rng, 2, 4);
        let n = pick(&mut rng, 30, 90);
        let rho = between(&mut rng, -0.8 / (p - 1) as f64, 0.8);
        let f = between(&mut rng, 0.1, 0.6);
        let mu = (0..p).map(|_| between(&mut rng, -1.0, 2.0)).collect();
        let cfg = MvnConfig { n, p, rho, sigma2: between(&mut rng, 0.5, 5.0), f, mu };
        if cfg.n_obs() <= p + 2 {
            continue;
        }
        let m = pick(&mut rng, 2, 8);
        let Ok((x, _)) = generate_mvn_experiment_data(&cfg, &mut rng) else { continue };
        let Ok(done) = impute_mvn_jeffreys(&x, m, &mut rng) else { continue };
        return (MvnModel::new(p, MeanNull::CommonMean).unwrap(), done);
    }
}

/// A random three-way table with a partly unrecorded first axis, imputed.
pub fn table_instance(seed: u64, i: u64) -> (MultinomialModel, CompletedDatasets<CountTable>) {
    let mut rng = RngStream::keyed(seed, &[i]);
    let dims = [pick(&mut rng, 2, 3), pick(&mut rng, 2, 3), 2];
    let counts = (0..dims.iter().product::<usize>()).map(|_| pick(&mut rng, 1, 40) as f64).collect();
    let unlabeled = (0..dims[1] * dims[2]).map(|_| pick(&mut rng, 0, 30) as f64).collect();
    let table = PartialTable::new(CountTable::new(dims, counts).unwrap(), unlabeled).unwrap();
    let null = if uniform(&mut rng) < 0.5 { TableNull::Mutual } else { TableNull::Conditional { given: pick(&mut rng, 0, 2) } };
    let m = pick(&mut rng, 2, 8);
    let done = impute_multinomial_dirichlet(&table, m, &mut rng).unwrap();
    (MultinomialModel::new(dims, null).unwrap(), done)
}

/// An AR(1) path with every fourth value imputed from its conditional law.
pub fn ar1_instance(seed: u64, i: u64, n: usize) -> Vec<Vec<f64>> {
    let mut rng = RngStream::keyed(seed, &[i]);
    let phi = between(&mut rng, -0.7, 0.7);
    let m = pick(&mut rng, 2, 6);
    let x = ar1_series(n, phi, &mut rng);
    ar1_conditional_imputations(&x, phi, 4, m, &mut rng)
}

pub fn stacked_via<M: LikelihoodModel>(model: &M, xs: &[M::Data], map: milrt::models::Param) -> (f64, f64) {
    use milrt::models::{reparametrize, Constraint, Direction};
    let s = model.stack(xs).unwrap();
    let m = xs.len() as f64;
    let round = |c| {
        let psi = model.mle(&s, c).unwrap();
        let phi = reparametrize(model, &psi, map, Direction::Forward).unwrap();
        reparametrize(model, &phi, map, Direction::Inverse).unwrap()
    };
    let free = 2.0 * model.loglik(&round(Constraint::Free), &s).unwrap();
    let null = 2.0 * model.loglik(&round(Constraint::Null), &s).unwrap();
    ((free - null) / m, free / m)
}

use super::{observed_rows, CompletedDatasets, MissingPattern, PatternTag, Provenance};
use crate::error::{Error, Result};
use crate::numkit::linalg::cholesky;
use crate::numkit::sample::{mvn, wishart};
use crate::numkit::{Matrix, RngStream};

/// Impute whole missing rows of a multivariate normal sample under the
/// Jeffreys prior.
///
/// For each imputation the precision is drawn from
/// Wishart(n_obs − 1, ((n_obs − 1) S_obs)⁻¹), the mean from
/// N(X̄_obs, Σ/n_obs), and each missing row from N(μ, Σ).
pub fn impute_mvn_jeffreys(x: &Matrix, m: usize, rng: &mut RngStream) -> Result<CompletedDatasets<Matrix>> {
    let (n, p) = (x.rows(), x.cols());
    let obs = observed_rows(x);
    let missing: Vec<usize> = (0..n).filter(|i| !obs.contains(i)).collect();
    if missing.iter().any(|&i| x.row(i).iter().any(|v| !v.is_nan())) {
        return Err(Error::Incompatible("rows must be fully observed or fully missing".into()));
    }
    let n_obs = obs.len();
    if n_obs <= p {
        return Err(Error::DegenerateData(format!("n_obs = {n_obs} must exceed p = {p}")));
    }
    let pattern = MissingPattern::of(x, PatternTag::BlockRows);
    let provenance = Provenance { imputer: "mvn_jeffreys".into(), seed: rng.seed(), stream: rng.stream() };
    if missing.is_empty() {
        return Ok(CompletedDatasets::new(vec![x.clone(); m], pattern, provenance)?.with_observed(x.clone()));
    }

    let mut mean = vec![0.0; p];
    for &i in &obs {
        for (a, v) in mean.iter_mut().zip(x.row(i)) {
            *a += v;
        }
    }
    mean.iter_mut().for_each(|a| *a /= n_obs as f64);
    // Cross-product matrix (n_obs − 1) S_obs.
    let mut ss = Matrix::zeros(p, p);
    for &i in &obs {
        let r = x.row(i);
        for a in 0..p {
            for b in 0..=a {
                ss[(a, b)] += (r[a] - mean[a]) * (r[b] - mean[b]);
            }
        }
    }
    ss.symmetrize_from_lower();
    let scale = cholesky(&ss)
        .map_err(|_| Error::DegenerateData("observed covariance is singular".into()))?
        .inverse();
    let scale = cholesky(&scale)?;

    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let prec = wishart((n_obs - 1) as f64, &scale, rng)?;
        let sigma = cholesky(&prec)?.inverse();
        let chol = cholesky(&sigma)?;
        let mu_chol = cholesky(&sigma.scale(1.0 / n_obs as f64))?;
        let mu = mvn(&mean, &mu_chol, rng);
        let mut done = x.clone();
        for &i in &missing {
            let draw = mvn(&mu, &chol, rng);
            done.row_mut(i).copy_from_slice(&draw);
        }
        out.push(done);
    }
    Ok(CompletedDatasets::new(out, pattern, provenance)?.with_observed(x.clone()))
}

use super::{CompletedDatasets, MissingPattern, PatternTag, Provenance};
use crate::error::{Error, Result};
use crate::numkit::linalg::{cholesky, dot};
use crate::numkit::sample::{chi_square, mvn, std_normal};
use crate::numkit::{Matrix, RngStream};

/// Least-squares pieces for regressing column `j` on an intercept and the
/// earlier columns over the rows that observe column `j`.
struct Regression {
    beta_hat: Vec<f64>,
    tau2_hat: f64,
    dof: f64,
    ztz_inv: crate::numkit::Cholesky,
}

fn regression(x: &Matrix, rows: &[usize], j: usize) -> Result<Regression> {
    let q = j + 1;
    let nj = rows.len();
    if nj <= q {
        return Err(Error::DegenerateData(format!("column {j}: {nj} observed rows for {q} coefficients")));
    }
    let mut ztz = Matrix::zeros(q, q);
    let mut ztw = vec![0.0; q];
    let mut z = vec![0.0; q];
    for &i in rows {
        let r = x.row(i);
        z[0] = 1.0;
        z[1..].copy_from_slice(&r[..j]);
        for a in 0..q {
            ztw[a] += z[a] * r[j];
            for b in 0..=a {
                ztz[(a, b)] += z[a] * z[b];
            }
        }
    }
    ztz.symmetrize_from_lower();
    let c = cholesky(&ztz).map_err(|_| Error::DegenerateData(format!("column {j}: collinear predictors")))?;
    let beta_hat = c.solve(&ztw)?;
    let mut rss = 0.0;
    for &i in rows {
        let r = x.row(i);
        z[0] = 1.0;
        z[1..].copy_from_slice(&r[..j]);
        rss += (r[j] - dot(&z, &beta_hat)).powi(2);
    }
    let dof = (nj - q) as f64;
    let ztz_inv = cholesky(&c.inverse())?;
    Ok(Regression { beta_hat, tau2_hat: rss / dof, dof, ztz_inv })
}

/// Impute a monotone pattern column by column with the sequential normal
/// regression model under the prior ∝ 1/(τ₁²⋯τ_p²).
///
/// For column j the regression variance is drawn from τ̂²(n_j − j)/χ²_{n_j − j},
/// the coefficients from N(β̂, τ²(ZᵀZ)⁻¹), and each missing entry from its
/// predictive normal given the row's earlier (possibly imputed) values.
pub fn impute_monotone_regression(x: &Matrix, m: usize, rng: &mut RngStream) -> Result<CompletedDatasets<Matrix>> {
    let (n, p) = (x.rows(), x.cols());
    for i in 0..n {
        let r = x.row(i);
        if r[0].is_nan() {
            return Err(Error::Incompatible("the first column must be fully observed".into()));
        }
        if r.windows(2).any(|w| w[0].is_nan() && !w[1].is_nan()) {
            return Err(Error::Incompatible(format!("row {i} is not monotone")));
        }
    }
    let observing: Vec<Vec<usize>> = (0..p).map(|j| (0..n).filter(|&i| !x[(i, j)].is_nan()).collect()).collect();
    let fits = (1..p)
        .map(|j| if observing[j].len() == n { Ok(None) } else { regression(x, &observing[j], j).map(Some) })
        .collect::<Result<Vec<_>>>()?;

    let pattern = MissingPattern::of(x, PatternTag::Monotone);
    let provenance = Provenance { imputer: "monotone_regression".into(), seed: rng.seed(), stream: rng.stream() };
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let mut done = x.clone();
        for (j, fit) in (1..p).zip(&fits) {
            let Some(fit) = fit else { continue };
            let tau2 = fit.tau2_hat * fit.dof / chi_square(fit.dof, rng)?;
            let tau = tau2.sqrt();
            let std_beta = mvn(&vec![0.0; j + 1], &fit.ztz_inv, rng);
            let beta: Vec<f64> = fit.beta_hat.iter().zip(&std_beta).map(|(b, e)| b + tau * e).collect();
            for i in 0..n {
                if x[(i, j)].is_nan() {
                    let r = done.row(i);
                    let mean = beta[0] + dot(&beta[1..], &r[..j]);
                    done[(i, j)] = mean + tau * std_normal(rng);
                }
            }
        }
        out.push(done);
    }
    Ok(CompletedDatasets::new(out, pattern, provenance)?.with_observed(x.clone()))
}

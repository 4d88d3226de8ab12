//! Multivariate normal with unstructured covariance.
//!
//! ψ = (μ, vech Σ) with vech taken row by row over the lower triangle.
//! Under (ii) the mean block becomes √σᵢᵢ/μᵢ and under (iii) ψ becomes
//! (Σ^{-1/2}μ, vech Σ⁻¹). For Wald tests θ is the vector of successive
//! (i) differences, (ii) ratios minus one or (iii) differences of cubes of
//! the means; under the zero-mean null θ = μ.

use serde::{Deserialize, Serialize};

use super::{check_len, Block, Constraint, LikelihoodModel, Param, WaldComponents};
use crate::error::{Error, Result};
use crate::numkit::linalg::{cholesky, dot, sqrtm_psd, Matrix};
use crate::optim::{self, Options};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanNull {
    /// μ₁ = … = μ_p, k = p − 1.
    CommonMean,
    /// μ = 0, k = p.
    ZeroMean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MvnModel {
    p: usize,
    null: MeanNull,
}

/// Sample size, mean and covariance with divisor n.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub mean: Vec<f64>,
    pub cov: Matrix,
}

pub fn moments(x: &Matrix) -> Moments {
    let (n, p) = (x.rows(), x.cols());
    let mut mean = vec![0.0; p];
    for i in 0..n {
        for (m, v) in mean.iter_mut().zip(x.row(i)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut cov = Matrix::zeros(p, p);
    for i in 0..n {
        let r = x.row(i);
        for a in 0..p {
            let da = r[a] - mean[a];
            for b in 0..=a {
                cov[(a, b)] += da * (r[b] - mean[b]);
            }
        }
    }
    for a in 0..p {
        for b in 0..=a {
            let v = cov[(a, b)] / n as f64;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    Moments { n, mean, cov }
}

impl MvnModel {
    pub fn new(p: usize, null: MeanNull) -> Result<Self> {
        if p == 0 || (null == MeanNull::CommonMean && p < 2) {
            return Err(Error::InvalidArgument(format!("p = {p} is too small for {null:?}")));
        }
        Ok(Self { p, null })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn null(&self) -> MeanNull {
        self.null
    }

    pub fn pack(mean: &[f64], cov: &Matrix) -> Vec<f64> {
        let mut v = mean.to_vec();
        v.extend(cov.vech());
        v
    }

    pub fn unpack(&self, psi: &[f64]) -> Result<(Vec<f64>, Matrix)> {
        check_len(psi, self.h(), "mvn")?;
        Ok((psi[..self.p].to_vec(), Matrix::from_vech(self.p, &psi[self.p..])?))
    }

    fn check_data(&self, x: &Matrix) -> Result<()> {
        if x.cols() != self.p {
            return Err(Error::DimensionMismatch(format!("data has {} columns, model p = {}", x.cols(), self.p)));
        }
        if x.rows() <= self.p {
            return Err(Error::DegenerateData(format!("n = {} must exceed p = {}", x.rows(), self.p)));
        }
        Ok(())
    }

    fn loglik_moments(&self, mean: &[f64], cov: &Matrix, m: &Moments) -> Result<f64> {
        let c = cholesky(cov).map_err(|_| Error::InvalidParameter("covariance is not positive definite".into()))?;
        let inv = c.inverse();
        let n = m.n as f64;
        let tr: f64 = (0..self.p).flat_map(|a| (0..self.p).map(move |b| (a, b))).map(|(a, b)| inv[(a, b)] * m.cov[(b, a)]).sum();
        let d: Vec<f64> = m.mean.iter().zip(mean).map(|(a, b)| a - b).collect();
        let q = c.quad_form(&d)?;
        Ok(-0.5 * n * (self.p as f64 * (2.0 * std::f64::consts::PI).ln() + c.log_det() + tr + q))
    }

    /// Closed-form maximizer given the sufficient statistics.
    pub fn mle_from_moments(&self, m: &Moments, c: Constraint) -> Result<Vec<f64>> {
        let chol = cholesky(&m.cov).map_err(|_| Error::DegenerateData("sample covariance is singular".into()))?;
        match c {
            Constraint::Free => Ok(Self::pack(&m.mean, &m.cov)),
            Constraint::Null => {
                let mu0 = match self.null {
                    MeanNull::CommonMean => {
                        let ones = vec![1.0; self.p];
                        let w = chol.solve(&ones)?;
                        let c0 = dot(&w, &m.mean) / dot(&w, &ones);
                        vec![c0; self.p]
                    }
                    MeanNull::ZeroMean => vec![0.0; self.p],
                };
                let d: Vec<f64> = m.mean.iter().zip(&mu0).map(|(a, b)| a - b).collect();
                let cov0 = m.cov.add(&Matrix::outer(&d, &d))?;
                Ok(Self::pack(&mu0, &cov0))
            }
        }
    }

    /// The same maximization done numerically in log-Cholesky coordinates.
    /// Slow; kept as an independent check on the closed forms.
    pub fn mle_numeric(&self, x: &Matrix, c: Constraint) -> Result<Vec<f64>> {
        self.check_data(x)?;
        let m = moments(x);
        let p = self.p;
        let nmean = match (c, self.null) {
            (Constraint::Free, _) => p,
            (Constraint::Null, MeanNull::CommonMean) => 1,
            (Constraint::Null, MeanNull::ZeroMean) => 0,
        };
        let decode = |z: &[f64]| -> (Vec<f64>, Matrix) {
            let mean = match nmean {
                0 => vec![0.0; p],
                1 if c == Constraint::Null => vec![z[0]; p],
                _ => z[..p].to_vec(),
            };
            let mut l = Matrix::zeros(p, p);
            let mut it = z[nmean..].iter();
            for i in 0..p {
                for j in 0..=i {
                    let v = *it.next().unwrap_or(&0.0);
                    l[(i, j)] = if i == j { v.exp() } else { v };
                }
            }
            let cov = l.matmul(&l.transpose()).unwrap_or_else(|_| Matrix::identity(p));
            (mean, cov)
        };
        let scale = m.n as f64;
        let f = |z: &[f64]| {
            let (mean, cov) = decode(z);
            match self.loglik_moments(&mean, &cov, &m) {
                Ok(v) => -v / scale,
                Err(_) => f64::INFINITY,
            }
        };
        let mut z0 = vec![0.0; nmean + p * (p + 1) / 2];
        let mut idx = nmean;
        for i in 0..p {
            for j in 0..=i {
                if i == j {
                    z0[idx] = 0.5 * m.cov[(i, i)].max(1e-8).ln();
                }
                idx += 1;
            }
        }
        if nmean == p {
            z0[..p].copy_from_slice(&m.mean);
        } else if nmean == 1 {
            z0[0] = m.mean.iter().sum::<f64>() / p as f64;
        }
        let opts = Options { gtol: 1e-11, ..Options::default() };
        let min = optim::minimize(&f, None, &z0, opts)?;
        let (mean, cov) = decode(&min.x);
        Ok(Self::pack(&mean, &cov))
    }

    fn theta_and_jacobian(&self, mu: &[f64], map: Param) -> Result<(Vec<f64>, Matrix)> {
        let p = self.p;
        if self.null == MeanNull::ZeroMean {
            if map != Param::I {
                return Err(Error::Unsupported("zero-mean Wald test only under (i)".into()));
            }
            return Ok((mu.to_vec(), Matrix::identity(p)));
        }
        let k = p - 1;
        let mut theta = vec![0.0; k];
        let mut jac = Matrix::zeros(k, p);
        for j in 0..k {
            let (a, b) = (mu[j], mu[j + 1]);
            match map {
                Param::I => {
                    theta[j] = b - a;
                    jac[(j, j)] = -1.0;
                    jac[(j, j + 1)] = 1.0;
                }
                Param::Ii => {
                    if a == 0.0 {
                        return Err(Error::InvalidParameter("zero mean in a ratio".into()));
                    }
                    theta[j] = b / a - 1.0;
                    jac[(j, j)] = -b / (a * a);
                    jac[(j, j + 1)] = 1.0 / a;
                }
                Param::Iii => {
                    theta[j] = b.powi(3) - a.powi(3);
                    jac[(j, j)] = -3.0 * a * a;
                    jac[(j, j + 1)] = 3.0 * b * b;
                }
            }
        }
        Ok((theta, jac))
    }
}

impl LikelihoodModel for MvnModel {
    type Data = Matrix;

    fn tag(&self) -> &'static str {
        "mvn"
    }

    fn h(&self) -> usize {
        (self.p * self.p + 3 * self.p) / 2
    }

    fn k(&self) -> usize {
        match self.null {
            MeanNull::CommonMean => self.p - 1,
            MeanNull::ZeroMean => self.p,
        }
    }

    fn layout(&self) -> Vec<Block> {
        vec![Block { name: "mean", len: self.p }, Block { name: "vech_cov", len: self.p * (self.p + 1) / 2 }]
    }

    fn null_tag(&self) -> String {
        match self.null {
            MeanNull::CommonMean => "common_mean".into(),
            MeanNull::ZeroMean => "zero_mean".into(),
        }
    }

    fn complete_cases(&self, x: &Matrix) -> Result<Matrix> {
        let rows: Vec<Vec<f64>> = (0..x.rows()).map(|i| x.row(i)).filter(|r| r.iter().all(|v| !v.is_nan())).map(|r| r.to_vec()).collect();
        if rows.is_empty() {
            return Err(Error::DegenerateData("no complete cases".into()));
        }
        Matrix::from_rows(&rows)
    }

    fn loglik(&self, psi: &[f64], x: &Matrix) -> Result<f64> {
        if x.cols() != self.p {
            return Err(Error::DimensionMismatch("data columns".into()));
        }
        let (mean, cov) = self.unpack(psi)?;
        self.loglik_moments(&mean, &cov, &moments(x))
    }

    fn mle(&self, x: &Matrix, c: Constraint) -> Result<Vec<f64>> {
        self.check_data(x)?;
        self.mle_from_moments(&moments(x), c)
    }

    fn stack(&self, xs: &[Matrix]) -> Result<Matrix> {
        let cols = xs.first().map_or(self.p, Matrix::cols);
        if xs.iter().any(|x| x.cols() != cols) {
            return Err(Error::DimensionMismatch("stacked datasets differ in columns".into()));
        }
        let rows: usize = xs.iter().map(Matrix::rows).sum();
        let data: Vec<f64> = xs.iter().flat_map(|x| x.as_slice().iter().copied()).collect();
        Matrix::from_vec(rows, cols, data)
    }

    fn averaged_loglik(&self, psi: &[f64], xs: &[Matrix]) -> Result<f64> {
        let (mean, cov) = self.unpack(psi)?;
        let mut s = 0.0;
        for x in xs {
            s += self.loglik_moments(&mean, &cov, &moments(x))?;
        }
        Ok(s / xs.len() as f64)
    }

    fn psi_forward(&self, psi: &[f64], map: Param) -> Result<Vec<f64>> {
        let (mean, cov) = self.unpack(psi)?;
        match map {
            Param::I => Ok(psi.to_vec()),
            Param::Ii => {
                let mut out = Vec::with_capacity(psi.len());
                for i in 0..self.p {
                    if mean[i] == 0.0 {
                        return Err(Error::InvalidParameter("noise-to-signal map needs nonzero means".into()));
                    }
                    out.push(cov[(i, i)].sqrt() / mean[i]);
                }
                out.extend(cov.vech());
                Ok(out)
            }
            Param::Iii => {
                let c = cholesky(&cov).map_err(|_| Error::InvalidParameter("covariance is not positive definite".into()))?;
                let prec = c.inverse();
                let root = sqrtm_psd(&prec)?;
                let mut out = root.mul_vec(&mean)?;
                out.extend(prec.vech());
                Ok(out)
            }
        }
    }

    fn psi_inverse(&self, phi: &[f64], map: Param) -> Result<Vec<f64>> {
        check_len(phi, self.h(), "mvn")?;
        let p = self.p;
        match map {
            Param::I => Ok(phi.to_vec()),
            Param::Ii => {
                let cov = Matrix::from_vech(p, &phi[p..])?;
                let mut mean = Vec::with_capacity(p);
                for i in 0..p {
                    if phi[i] == 0.0 || !(cov[(i, i)] > 0.0) {
                        return Err(Error::InvalidParameter("noise-to-signal inverse needs nonzero ratios".into()));
                    }
                    mean.push(cov[(i, i)].sqrt() / phi[i]);
                }
                Ok(Self::pack(&mean, &cov))
            }
            Param::Iii => {
                let prec = Matrix::from_vech(p, &phi[p..])?;
                let c = cholesky(&prec).map_err(|_| Error::InvalidParameter("precision is not positive definite".into()))?;
                let cov = c.inverse();
                let mean = sqrtm_psd(&cov)?.mul_vec(&phi[..p])?;
                Ok(Self::pack(&mean, &cov))
            }
        }
    }

    fn wald(&self, x: &Matrix, map: Param) -> Result<WaldComponents> {
        self.check_data(x)?;
        let m = moments(x);
        let (theta_hat, jac) = self.theta_and_jacobian(&m.mean, map)?;
        let var_mu = m.cov.scale(1.0 / m.n as f64);
        let mut u = jac.matmul(&var_mu)?.matmul(&jac.transpose())?;
        u.symmetrize();
        if cholesky(&u).is_err() || theta_hat.iter().any(|t| !t.is_finite()) {
            return Err(Error::SingularCovariance);
        }
        Ok(WaldComponents { theta_hat, u })
    }
}

use crate::error::{Error, Result};
use crate::models::WaldComponents;
use crate::numkit::linalg::cholesky;
use crate::numkit::Matrix;

/// Between/within decomposition of m point estimates and their variances.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledMoments {
    pub theta_bar: Vec<f64>,
    pub u_bar: Matrix,
    pub b: Matrix,
    pub t: Matrix,
    pub m: usize,
    pub k: usize,
}

pub fn pool_moments(parts: &[WaldComponents]) -> Result<PooledMoments> {
    let m = parts.len();
    if m < 2 {
        return Err(Error::InvalidArgument(format!("pooling needs m >= 2, got {m}")));
    }
    let k = parts[0].theta_hat.len();
    if parts.iter().any(|w| w.theta_hat.len() != k || w.u.rows() != k || w.u.cols() != k) {
        return Err(Error::DimensionMismatch("Wald components differ in dimension".into()));
    }
    let mf = m as f64;
    let theta_bar: Vec<f64> = (0..k).map(|j| parts.iter().map(|w| w.theta_hat[j]).sum::<f64>() / mf).collect();
    let mut u_bar = Matrix::zeros(k, k);
    let mut b = Matrix::zeros(k, k);
    for w in parts {
        u_bar = u_bar.add(&w.u)?;
        let d: Vec<f64> = w.theta_hat.iter().zip(&theta_bar).map(|(a, c)| a - c).collect();
        b = b.add(&Matrix::outer(&d, &d))?;
    }
    let u_bar = u_bar.scale(1.0 / mf);
    let b = b.scale(1.0 / (mf - 1.0));
    let t = u_bar.add(&b.scale(1.0 + 1.0 / mf))?;
    Ok(PooledMoments { theta_bar, u_bar, b, t, m, k })
}

/// Wald distance (θ − θ₀)ᵀ U⁻¹ (θ − θ₀).
pub fn d_wt(theta: &[f64], theta0: &[f64], u: &Matrix) -> Result<f64> {
    let c = cholesky(u).map_err(|_| Error::SingularCovariance)?;
    let d: Vec<f64> = theta.iter().zip(theta0).map(|(a, b)| a - b).collect();
    c.quad_form(&d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(theta: f64, u: f64) -> WaldComponents {
        WaldComponents { theta_hat: vec![theta], u: Matrix::diag(&[u]) }
    }

    #[test]
    fn hand_example() {
        let p = pool_moments(&[scalar(0.0, 1.0), scalar(2.0, 1.0)]).unwrap();
        assert_eq!(p.theta_bar, vec![1.0]);
        assert_eq!(p.b[(0, 0)], 2.0);
        assert_eq!(p.t[(0, 0)], 4.0);
    }

    #[test]
    fn identical_estimates_have_no_between_variance() {
        let p = pool_moments(&[scalar(0.5, 2.0), scalar(0.5, 2.0), scalar(0.5, 2.0)]).unwrap();
        assert_eq!(p.b[(0, 0)], 0.0);
        assert_eq!(p.t, p.u_bar);
    }

    #[test]
    fn single_dataset_rejected() {
        assert!(pool_moments(&[scalar(0.0, 1.0)]).is_err());
    }
}

//! Stationary Gaussian AR(1), ψ = (φ, σ²), tested against φ = 0.
//!
//! The first observation enters with its stationary variance σ²/(1 − φ²),
//! so with Q(φ) = (1 − φ²)x₁² + Σᵢ₌₂ (xᵢ − φxᵢ₋₁)² the log-likelihood is
//! −(n/2)log 2πσ² + ½log(1 − φ²) − Q(φ)/(2σ²). Stacking concatenates the
//! series, which links the end of one to the start of the next.

use super::{check_len, Block, Constraint, LikelihoodModel};
use crate::error::{Error, Result};
use crate::optim::{self, Options};

pub type Series = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Ar1Model;

/// Q(φ) = a − 2bφ + cφ², summed over several series, with the count of
/// observations and of first-observation terms.
#[derive(Debug, Clone, Copy, Default)]
struct Quad {
    n: f64,
    starts: f64,
    a: f64,
    b: f64,
    c: f64,
}

impl Quad {
    fn of(x: &[f64]) -> Self {
        let a = x.iter().map(|v| v * v).sum();
        let b = x.windows(2).map(|w| w[0] * w[1]).sum();
        let c = if x.len() > 2 { x[1..x.len() - 1].iter().map(|v| v * v).sum() } else { 0.0 };
        Quad { n: x.len() as f64, starts: 1.0, a, b, c }
    }

    fn add(self, o: Quad) -> Quad {
        Quad { n: self.n + o.n, starts: self.starts + o.starts, a: self.a + o.a, b: self.b + o.b, c: self.c + o.c }
    }

    fn q(&self, phi: f64) -> f64 {
        self.a - 2.0 * self.b * phi + self.c * phi * phi
    }

    fn loglik(&self, phi: f64, s2: f64) -> f64 {
        -0.5 * self.n * (2.0 * std::f64::consts::PI * s2).ln() + 0.5 * self.starts * (1.0 - phi * phi).ln()
            - self.q(phi) / (2.0 * s2)
    }

    fn fit(&self, c: Constraint) -> Result<Vec<f64>> {
        if self.n < 2.0 || !(self.a > 0.0) {
            return Err(Error::DegenerateData("series is too short or identically zero".into()));
        }
        if c == Constraint::Null {
            return Ok(vec![0.0, self.a / self.n]);
        }
        // Profile out σ² and maximize over z = atanh φ, per observation so
        // the optimizer's tolerance does not depend on the series length.
        let w = self.starts / self.n;
        let f = |z: &[f64]| {
            let phi = z[0].tanh();
            let q = self.q(phi);
            if !(q > 0.0) {
                return f64::INFINITY;
            }
            0.5 * (q / self.n).ln() - 0.5 * w * (1.0 - phi * phi).ln()
        };
        let g = |z: &[f64]| {
            let phi = z[0].tanh();
            let dq = -2.0 * self.b + 2.0 * self.c * phi;
            let d = 0.5 * dq / self.q(phi) + w * phi / (1.0 - phi * phi);
            vec![d * (1.0 - phi * phi)]
        };
        let start = (self.b / self.a).clamp(-0.95, 0.95).atanh();
        let min = optim::minimize(&f, Some(&g), &[start], Options::default())?;
        let phi = min.x[0].tanh();
        Ok(vec![phi, self.q(phi) / self.n])
    }
}

impl Ar1Model {
    fn check(psi: &[f64]) -> Result<(f64, f64)> {
        check_len(psi, 2, "ar1")?;
        let (phi, s2) = (psi[0], psi[1]);
        if !(phi.abs() < 1.0) || !(s2 > 0.0) {
            return Err(Error::InvalidParameter(format!("ar1 needs |phi| < 1 and sigma2 > 0, got ({phi}, {s2})")));
        }
        Ok((phi, s2))
    }
}

impl LikelihoodModel for Ar1Model {
    type Data = Series;

    fn tag(&self) -> &'static str {
        "ar1"
    }

    fn h(&self) -> usize {
        2
    }

    fn k(&self) -> usize {
        1
    }

    fn layout(&self) -> Vec<Block> {
        vec![Block { name: "phi", len: 1 }, Block { name: "sigma2", len: 1 }]
    }

    fn null_tag(&self) -> String {
        "phi_zero".into()
    }

    fn loglik(&self, psi: &[f64], x: &Series) -> Result<f64> {
        let (phi, s2) = Self::check(psi)?;
        if x.is_empty() {
            return Err(Error::DegenerateData("empty series".into()));
        }
        Ok(Quad::of(x).loglik(phi, s2))
    }

    fn mle(&self, x: &Series, c: Constraint) -> Result<Vec<f64>> {
        Quad::of(x).fit(c)
    }

    fn stack(&self, xs: &[Series]) -> Result<Series> {
        Ok(xs.concat())
    }

    /// Maximizes the mean of the separate log-likelihoods, which differs
    /// from the stacked MLE by the boundary terms.
    fn averaged_mle(&self, xs: &[Series], c: Constraint) -> Result<Vec<f64>> {
        let q = xs.iter().map(|x| Quad::of(x)).fold(Quad::default(), Quad::add);
        q.fit(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independence_at_zero() {
        let l = Ar1Model.loglik(&[0.0, 1.0], &vec![0.0, 0.0, 0.0]).unwrap();
        assert!((l + 1.5 * (2.0 * std::f64::consts::PI).ln()).abs() < 1e-14);
    }

    #[test]
    fn loglik_matches_direct_density() {
        let x = vec![0.4, -1.2, 0.3, 0.9, 1.5];
        let (phi, s2) = (0.35, 1.7);
        let mut direct = -0.5 * (2.0 * std::f64::consts::PI * s2 / (1.0 - phi * phi)).ln()
            - x[0] * x[0] * (1.0 - phi * phi) / (2.0 * s2);
        for w in x.windows(2) {
            let e = w[1] - phi * w[0];
            direct += -0.5 * (2.0 * std::f64::consts::PI * s2).ln() - e * e / (2.0 * s2);
        }
        assert!((Ar1Model.loglik(&[phi, s2], &x).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn free_mle_is_stationary_point() {
        let x = vec![0.4, -1.2, 0.3, 0.9, 1.5, 0.7, -0.2, -0.9, 0.1, 0.5];
        let psi = Ar1Model.mle(&x, Constraint::Free).unwrap();
        let f = |p: &[f64]| Ar1Model.loglik(p, &x).unwrap();
        let g = optim::numeric_gradient(&f, &psi);
        assert!(g.iter().all(|v| v.abs() < 1e-6), "{g:?}");
        assert!(Ar1Model.lrt_stat(&x).unwrap() >= 0.0);
    }

    #[test]
    fn out_of_domain_phi() {
        assert!(Ar1Model.loglik(&[1.0, 1.0], &vec![0.0]).is_err());
    }
}

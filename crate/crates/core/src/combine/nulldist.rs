use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::sample::chi_square;
use crate::numkit::RngStream;

/// Which denominator variable enters `(1 + r) M₁ / (1 + r M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// M ~ χ²_{k(m−1)} / (k(m−1)).
    ByK,
    /// M ~ χ²_{h(m−1)} / (h(m−1)).
    ByH,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullDistSpec {
    pub r_m: f64,
    pub k: usize,
    pub h: usize,
    pub m: usize,
    pub representation: Representation,
}

impl NullDistSpec {
    pub fn denominator_df(&self) -> f64 {
        let dim = match self.representation {
            Representation::ByK => self.k,
            Representation::ByH => self.h,
        };
        (dim * (self.m - 1)) as f64
    }
}

/// Draw `n` values of the limiting null statistic.
pub fn simulate_null_d(spec: &NullDistSpec, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    if spec.m < 2 || spec.k == 0 || spec.h < spec.k || !(spec.r_m >= 0.0) {
        return Err(Error::InvalidArgument(format!("invalid null distribution spec {spec:?}")));
    }
    let (k, dd) = (spec.k as f64, spec.denominator_df());
    let r = spec.r_m;
    (0..n)
        .map(|_| {
            let m1 = chi_square(k, rng)? / k;
            let m3 = chi_square(dd, rng)? / dd;
            Ok((1.0 + r) * m1 / (1.0 + r * m3))
        })
        .collect()
}

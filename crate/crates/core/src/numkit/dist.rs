//! Chi-square and F distributions: CDF, survival function, density, quantile.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::special::{gamma_pq_checked, ln_beta, ln_gamma_unchecked, reg_inc_beta, reg_inc_beta_upper};
use crate::error::{invalid, Result};

/// Denominator degrees of freedom; `Infinite` selects the χ²_k/k limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Df2 {
    Finite(f64),
    Infinite,
}

impl Df2 {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Df2::Infinite)
    }

    pub fn value(&self) -> f64 {
        match *self {
            Df2::Finite(v) => v,
            Df2::Infinite => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for Df2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Df2::Finite(v) => write!(f, "{v}"),
            Df2::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Df2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Df2::Finite(v) => s.serialize_f64(*v),
            Df2::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Df2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Df2::Finite(v)),
            Raw::Text(t) if t == "inf" => Ok(Df2::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad df2 {t:?}"))),
        }
    }
}

/// A continuous distribution on [0, ∞).
pub trait Continuous {
    fn cdf(&self, x: f64) -> f64;
    fn sf(&self, x: f64) -> f64;
    fn pdf(&self, x: f64) -> f64;

    /// Inverse CDF by bracketed Newton with a bisection fallback.
    fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return invalid(format!("quantile requires 0 < q < 1, got {q}"));
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.cdf(hi) < q {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return Ok(f64::INFINITY);
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..500 {
            let fx = self.cdf(x) - q;
            if fx == 0.0 {
                return Ok(x);
            }
            if fx < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let d = self.pdf(x);
            let mut next = if d > 0.0 && d.is_finite() { x - fx / d } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-12 * x.abs().max(1e-300) || hi - lo <= 1e-15 * hi {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }
}

/// Chi-square with `k` degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquared {
    k: f64,
}

impl ChiSquared {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return invalid(format!("chi-square df must be positive, got {k}"));
        }
        Ok(Self { k })
    }

    pub fn df(&self) -> f64 {
        self.k
    }
}

impl Continuous for ChiSquared {
    fn cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        gamma_pq_checked(0.5 * self.k, 0.5 * x).0
    }

    fn sf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 1.0;
        }
        gamma_pq_checked(0.5 * self.k, 0.5 * x).1
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let a = 0.5 * self.k;
        if x == 0.0 {
            return match a.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY,
                Some(std::cmp::Ordering::Equal) => 0.5,
                _ => 0.0,
            };
        }
        ((a - 1.0) * x.ln() - 0.5 * x - a * std::f64::consts::LN_2 - ln_gamma_unchecked(a)).exp()
    }
}

/// F distribution F(df1, df2); `Df2::Infinite` is the χ²_{df1}/df1 limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FDist {
    df1: f64,
    df2: Df2,
}

impl FDist {
    pub fn new(df1: f64, df2: Df2) -> Result<Self> {
        if !(df1 > 0.0) || !df1.is_finite() {
            return invalid(format!("F df1 must be positive, got {df1}"));
        }
        if let Df2::Finite(d) = df2 {
            if !(d > 0.0) {
                return invalid(format!("F df2 must be positive, got {d}"));
            }
        }
        Ok(Self { df1, df2 })
    }

    pub fn df1(&self) -> f64 {
        self.df1
    }

    pub fn df2(&self) -> Df2 {
        self.df2
    }

    fn finite_df2(&self) -> Option<f64> {
        match self.df2 {
            Df2::Finite(d) if d.is_finite() => Some(d),
            _ => None,
        }
    }

    fn limit(&self) -> ChiSquared {
        ChiSquared { k: self.df1 }
    }
}

impl Continuous for FDist {
    fn cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        match self.finite_df2() {
            None => self.limit().cdf(self.df1 * x),
            Some(d2) => {
                let t = self.df1 * x;
                if t > d2 {
                    reg_inc_beta_upper(0.5 * d2, 0.5 * self.df1, d2 / (d2 + t)).unwrap_or(f64::NAN)
                } else {
                    reg_inc_beta(0.5 * self.df1, 0.5 * d2, t / (d2 + t)).unwrap_or(f64::NAN)
                }
            }
        }
    }

    fn sf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 1.0;
        }
        match self.finite_df2() {
            None => self.limit().sf(self.df1 * x),
            Some(d2) => {
                let t = self.df1 * x;
                if t > d2 {
                    reg_inc_beta(0.5 * d2, 0.5 * self.df1, d2 / (d2 + t)).unwrap_or(f64::NAN)
                } else {
                    reg_inc_beta_upper(0.5 * self.df1, 0.5 * d2, t / (d2 + t)).unwrap_or(f64::NAN)
                }
            }
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match self.finite_df2() {
            None => self.df1 * self.limit().pdf(self.df1 * x),
            Some(d2) => {
                if x == 0.0 {
                    return ChiSquared { k: self.df1 }.pdf(0.0);
                }
                let (a, b) = (0.5 * self.df1, 0.5 * d2);
                let ln = a * (self.df1 / d2).ln() + (a - 1.0) * x.ln()
                    - (a + b) * (self.df1 * x / d2).ln_1p()
                    - ln_beta(a, b);
                ln.exp()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_cdf_examples() {
        let f = FDist::new(3.0, Df2::Finite(10.0)).unwrap();
        assert_eq!(f.cdf(0.0), 0.0);
        let f = FDist::new(1.0, Df2::Infinite).unwrap();
        assert!((f.cdf(1.0) - 0.682_689_492_137_085_9).abs() < 1e-12);
        assert!(FDist::new(0.0, Df2::Infinite).is_err());
        assert!(FDist::new(1.0, Df2::Finite(-2.0)).is_err());
    }

    #[test]
    fn chi_square_examples() {
        let c = ChiSquared::new(2.0).unwrap();
        let m = 2.0 * std::f64::consts::LN_2;
        assert!((c.cdf(m) - 0.5).abs() < 1e-14);
        assert!((c.quantile(0.5).unwrap() - m).abs() < 1e-11);
    }

    #[test]
    fn quantile_examples() {
        let f = FDist::new(2.0, Df2::Finite(40.0)).unwrap();
        let q = f.quantile(f.cdf(1.7)).unwrap();
        assert!((q - 1.7).abs() < 1e-10);
        let f = FDist::new(1.0, Df2::Infinite).unwrap();
        assert!((f.quantile(0.95).unwrap() - 3.841_458_820_694_124).abs() < 1e-9);
        assert!(f.quantile(1.0).is_err());
        assert!(f.quantile(0.0).is_err());
    }

    // Frozen from scipy.stats.f.
    #[test]
    fn f_against_reference() {
        let f = FDist::new(4.0, Df2::Finite(7.5)).unwrap();
        assert!((f.cdf(2.2) - 0.835_397_837_683_182_9).abs() < 1e-12, "{}", f.cdf(2.2));
        assert!(((f.sf(30.0) - 1.101_180_085_282_586_3e-4) / 1.1e-4).abs() < 1e-10, "{}", f.sf(30.0));
        let f = FDist::new(2.0, Df2::Finite(1e9)).unwrap();
        let c = ChiSquared::new(2.0).unwrap();
        assert!((f.cdf(3.0) - c.cdf(6.0)).abs() < 1e-8);
    }

    #[test]
    fn pdf_integrates_to_cdf() {
        let f = FDist::new(3.0, Df2::Finite(12.0)).unwrap();
        let n = 20_000;
        let (a, b) = (0.5, 2.5);
        let h = (b - a) / n as f64;
        let mut s = f.pdf(a) + f.pdf(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f.pdf(a + i as f64 * h);
        }
        let integral = s * h / 3.0;
        assert!((integral - (f.cdf(b) - f.cdf(a))).abs() < 1e-12);
    }
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::df::{df_denominator, DfKind};
use super::fmi::{odds_from_gap, r_wald_half, r_wald_one, r_wald_prime, DfBasis, FmiEstimate, FmiMethod};
use super::lrt::{averaged_lrt, legacy_lrt, per_dataset, stacked_lrt};
use super::moments::{d_wt, pool_moments};
use crate::error::{Error, Result};
use crate::imputers::CompletedDatasets;
use crate::models::{LikelihoodModel, Param, WaldComponents};
use crate::numkit::{Continuous, Df2, FDist};

/// The rows of the method table: six Wald-type and eight likelihood-ratio tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "W-1")]
    W1,
    #[serde(rename = "W-2")]
    W2,
    #[serde(rename = "W-3")]
    W3,
    #[serde(rename = "W-4")]
    W4,
    #[serde(rename = "W-5")]
    W5,
    #[serde(rename = "W-6")]
    W6,
    #[serde(rename = "L-0")]
    L0,
    #[serde(rename = "L-1")]
    L1,
    #[serde(rename = "L-2")]
    L2,
    #[serde(rename = "L-3")]
    L3,
    #[serde(rename = "L-4")]
    L4,
    #[serde(rename = "L-5")]
    L5,
    #[serde(rename = "L-6")]
    L6,
    #[serde(rename = "L-7")]
    L7,
}

impl Method {
    pub const ALL: [Method; 14] = [
        Method::W1,
        Method::W2,
        Method::W3,
        Method::W4,
        Method::W5,
        Method::W6,
        Method::L0,
        Method::L1,
        Method::L2,
        Method::L3,
        Method::L4,
        Method::L5,
        Method::L6,
        Method::L7,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Method::W1 => "W-1",
            Method::W2 => "W-2",
            Method::W3 => "W-3",
            Method::W4 => "W-4",
            Method::W5 => "W-5",
            Method::W6 => "W-6",
            Method::L0 => "L-0",
            Method::L1 => "L-1",
            Method::L2 => "L-2",
            Method::L3 => "L-3",
            Method::L4 => "L-4",
            Method::L5 => "L-5",
            Method::L6 => "L-6",
            Method::L7 => "L-7",
        }
    }

    pub fn is_wald(&self) -> bool {
        matches!(self, Method::W1 | Method::W2 | Method::W3 | Method::W4 | Method::W5 | Method::W6)
    }

    /// Whether the table lists a proposed null approximation for this method.
    pub fn has_proposed(&self) -> bool {
        !matches!(self, Method::W2 | Method::W3 | Method::W5 | Method::W6)
    }

    /// Whether the statistic can legitimately be negative.
    pub fn may_be_negative(&self) -> bool {
        matches!(self, Method::W5 | Method::W6 | Method::L1)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.chars().filter(|c| *c != '-' && *c != '_').collect::<String>().to_ascii_uppercase();
        Method::ALL
            .into_iter()
            .find(|m| m.label().replace('-', "") == norm)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

/// Reference F distribution: the one each method was introduced with, or
/// the one built on d̂f.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NullApprox {
    Original,
    Proposed,
}

impl FromStr for NullApprox {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "original" => Ok(NullApprox::Original),
            "proposed" => Ok(NullApprox::Proposed),
            other => Err(Error::InvalidArgument(format!("unknown null approximation {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOptions {
    /// `None` picks Proposed where it exists and Original otherwise.
    pub null_approx: Option<NullApprox>,
    /// θ-parametrization for the Wald family and ψ-map for L-1/L-2.
    pub param: Param,
}

impl Default for TestOptions {
    fn default() -> Self {
        Self { null_approx: None, param: Param::I }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub negative_statistic: bool,
    pub negative_r: bool,
    pub infinite_df: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: Method,
    pub statistic: f64,
    pub k: usize,
    pub df2: Df2,
    pub p_value: f64,
    /// Absent only for L-0, which does not estimate r.
    pub r_hat: Option<FmiEstimate>,
    pub null_approx: NullApprox,
    pub diagnostics: Diagnostics,
}

fn finish(
    method: Method,
    statistic: f64,
    k: usize,
    m: usize,
    r: Option<FmiEstimate>,
    approx: NullApprox,
    dim: usize,
) -> Result<TestResult> {
    if statistic.is_nan() {
        return Err(Error::DegenerateData(format!("{method} statistic is NaN")));
    }
    let df2 = match r {
        None => Df2::Infinite,
        Some(e) => {
            let kind = match (method.is_wald() && !method.has_proposed(), approx) {
                (true, _) => DfKind::Prime,
                (false, NullApprox::Original) => DfKind::Classic,
                (false, NullApprox::Proposed) => DfKind::New,
            };
            df_denominator(kind, e.r_hat, dim, m)?
        }
    };
    let p_value = if statistic < 0.0 { 1.0 } else { FDist::new(k as f64, df2)?.sf(statistic).clamp(0.0, 1.0) };
    let diagnostics = Diagnostics {
        negative_statistic: statistic < 0.0,
        negative_r: r.is_some_and(|e| e.negative),
        infinite_df: df2.is_infinite(),
    };
    Ok(TestResult { method, statistic, k, df2, p_value, r_hat: r, null_approx: approx, diagnostics })
}

fn resolve(method: Method, opts: &TestOptions) -> Result<NullApprox> {
    match opts.null_approx {
        Some(NullApprox::Proposed) if !method.has_proposed() => {
            Err(Error::Unsupported(format!("{method} has no proposed null approximation")))
        }
        Some(a) => Ok(a),
        None if method.has_proposed() => Ok(NullApprox::Proposed),
        None => Ok(NullApprox::Original),
    }
}

/// Run one row of the method table on a set of completed datasets.
///
/// L-0 ignores the imputations and uses the complete cases of the observed
/// view carried by `data`.
pub fn run_test<M: LikelihoodModel + ?Sized>(
    method: Method,
    model: &M,
    data: &CompletedDatasets<M::Data>,
    opts: &TestOptions,
) -> Result<TestResult> {
    let approx = resolve(method, opts)?;
    let k = model.k();
    if method == Method::L0 {
        let obs = data
            .observed
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("L-0 needs the observed data".into()))?;
        let d = model.lrt_stat(&model.complete_cases(obs)?)? / k as f64;
        return finish(method, d, k, 2, None, approx, k);
    }
    let m = data.m();
    if m < 2 {
        return Err(Error::Incompatible(format!("{method} needs m >= 2 imputations, got {m}")));
    }
    let xs = &data.datasets;
    let kf = k as f64;
    if method.is_wald() {
        return wald_test(method, model, xs, opts.param, approx);
    }
    let scale = |d: f64, r: f64| d / (kf * (1.0 + r));
    match method {
        Method::L1 | Method::L2 => {
            let legacy = legacy_lrt(model, xs, opts.param)?;
            let pd = per_dataset(model, xs)?;
            let r = FmiEstimate::new(odds_from_gap(pd.d_bar - legacy.d_tilde, k, m)?, FmiMethod::Legacy, DfBasis::K);
            if method == Method::L1 {
                finish(method, scale(legacy.d_tilde, r.r_hat), k, m, Some(r), approx, k)
            } else {
                let r = r.plus();
                finish(method, scale(legacy.d_tilde, r.r_hat).max(0.0), k, m, Some(r), approx, k)
            }
        }
        Method::L3 | Method::L4 | Method::L5 => {
            let s = stacked_lrt(model, xs)?;
            let pd = per_dataset(model, xs)?;
            let (r, dim) = match method {
                Method::L3 => (FmiEstimate::new(odds_from_gap(pd.d_bar - s.d_hat, k, m)?, FmiMethod::Stack, DfBasis::K), k),
                Method::L4 => {
                    (FmiEstimate::new(odds_from_gap(pd.d_bar - s.d_hat, k, m)?, FmiMethod::Stack, DfBasis::K).plus(), k)
                }
                _ => {
                    let h = model.h();
                    (FmiEstimate::new(odds_from_gap(pd.delta_bar - s.delta_hat, h, m)?, FmiMethod::StackRob, DfBasis::H), h)
                }
            };
            finish(method, scale(s.d_hat, r.r_hat), k, m, Some(r), approx, dim)
        }
        Method::L6 | Method::L7 => {
            let a = averaged_lrt(model, xs)?;
            let pd = per_dataset(model, xs)?;
            let (r, dim) = if method == Method::L6 {
                (FmiEstimate::new(odds_from_gap(pd.d_bar - a.d_hat, k, m)?, FmiMethod::Avg, DfBasis::K).plus(), k)
            } else {
                let h = model.h();
                (FmiEstimate::new(odds_from_gap(pd.delta_bar - a.delta_hat, h, m)?, FmiMethod::Rob, DfBasis::H), h)
            };
            finish(method, scale(a.d_hat, r.r_hat), k, m, Some(r), approx, dim)
        }
        _ => unreachable!("Wald and L-0 handled above"),
    }
}

fn wald_test<M: LikelihoodModel + ?Sized>(
    method: Method,
    model: &M,
    xs: &[M::Data],
    param: Param,
    approx: NullApprox,
) -> Result<TestResult> {
    let parts: Vec<WaldComponents> = xs.iter().map(|x| model.wald(x, param)).collect::<Result<_>>()?;
    let est = model.estimand();
    let (k, m) = (est.k, xs.len());
    let kf = k as f64;
    let moments = pool_moments(&parts)?;
    let thetas: Vec<Vec<f64>> = parts.iter().map(|w| w.theta_hat.clone()).collect();
    let per = || -> Result<Vec<f64>> { parts.iter().map(|w| d_wt(&w.theta_hat, &est.theta0, &w.u)).collect() };
    let prime = || r_wald_prime(&moments, &thetas, &est.theta0);
    let (statistic, r) = match method {
        Method::W1 => {
            let w = prime()?;
            (w.d_tilde / (kf * (1.0 + w.r.r_hat)), w.r)
        }
        Method::W2 | Method::W3 => {
            let d = per()?;
            let r = if method == Method::W2 { r_wald_one(&d, k)? } else { r_wald_half(&d)? };
            let d_tilde = d_wt(&moments.theta_bar, &est.theta0, &moments.u_bar)?;
            (d_tilde / (kf * (1.0 + r.r_hat)), r)
        }
        Method::W4 => {
            let w = prime()?;
            (d_wt(&moments.theta_bar, &est.theta0, &moments.t)? / kf, w.r)
        }
        Method::W5 | Method::W6 => {
            let d = per()?;
            let r = if method == Method::W5 { r_wald_one(&d, k)? } else { r_wald_half(&d)? };
            let d_bar = d.iter().sum::<f64>() / m as f64;
            let mf = m as f64;
            ((d_bar - kf * (mf - 1.0) / (mf + 1.0) * r.r_hat) / (kf * (1.0 + r.r_hat)), r)
        }
        _ => unreachable!("only Wald methods reach here"),
    };
    finish(method, statistic, k, m, Some(r), approx, k)
}

/// Robust stacked test: L-5 with the proposed reference distribution.
pub fn run_algorithm_rob<M: LikelihoodModel + ?Sized>(model: &M, data: &CompletedDatasets<M::Data>) -> Result<TestResult> {
    run_test(Method::L5, model, data, &TestOptions { null_approx: Some(NullApprox::Proposed), param: Param::I })
}

/// Stacked test with the truncated estimator: L-4 with the proposed reference distribution.
pub fn run_algorithm_plus<M: LikelihoodModel + ?Sized>(model: &M, data: &CompletedDatasets<M::Data>) -> Result<TestResult> {
    run_test(Method::L4, model, data, &TestOptions { null_approx: Some(NullApprox::Proposed), param: Param::I })
}

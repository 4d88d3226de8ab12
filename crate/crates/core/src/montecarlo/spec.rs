use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combine::{Method, NullApprox};
use crate::models::Param;

/// A test procedure in a study: a row of the method table, or one of the
/// two benchmarks available when the complete data are known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Procedure {
    Test(Method),
    Benchmark(Benchmark),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Benchmark {
    /// LRT on the data before any value went missing.
    C1,
    /// LRT on the complete cases.
    C2,
}

impl fmt::Display for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Procedure::Test(m) => f.write_str(m.label()),
            Procedure::Benchmark(Benchmark::C1) => f.write_str("C1"),
            Procedure::Benchmark(Benchmark::C2) => f.write_str("C2"),
        }
    }
}

/// Draws of the limiting null statistic against the two F approximations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NulldistGrid {
    pub m: Vec<usize>,
    pub k: Vec<usize>,
    /// h / k.
    pub tau: Vec<usize>,
    pub f_m: Vec<f64>,
    pub alpha: Vec<f64>,
}

/// Exchangeable normal data with the last rows missing, tested for a common mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MvnGrid {
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    #[serde(default = "default_p")]
    pub p: Vec<usize>,
    #[serde(default = "default_rho")]
    pub rho: Vec<f64>,
    #[serde(default = "default_f")]
    pub f: Vec<f64>,
    /// Mean shift; zero everywhere for the size design.
    #[serde(default = "default_delta")]
    pub delta: Vec<f64>,
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
    #[serde(default = "default_params")]
    pub params: Vec<Param>,
    pub methods: Vec<Procedure>,
    #[serde(default = "default_alpha")]
    pub alpha: Vec<f64>,
    #[serde(default)]
    pub null_approx: Option<NullApprox>,
}

fn default_p() -> Vec<usize> {
    vec![2]
}
fn default_rho() -> Vec<f64> {
    vec![0.4]
}
fn default_f() -> Vec<f64> {
    vec![0.5]
}
fn default_delta() -> Vec<f64> {
    vec![0.0]
}
fn default_sigma2() -> f64 {
    5.0
}
fn default_params() -> Vec<Param> {
    vec![Param::I]
}
fn default_alpha() -> Vec<f64> {
    vec![0.005, 0.05]
}

/// Monotone dropout driven by the previous variable, tested for a zero mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotoneGrid {
    #[serde(default = "default_mono_n")]
    pub n: usize,
    #[serde(default = "default_mono_p")]
    pub p: usize,
    pub m: Vec<usize>,
    pub delta: Vec<f64>,
    /// (α₀, α₁) pairs of the dropout model.
    pub mechanisms: Vec<[f64; 2]>,
    pub methods: Vec<Procedure>,
    #[serde(default = "default_alpha")]
    pub alpha: Vec<f64>,
}

fn default_mono_n() -> usize {
    500
}
fn default_mono_p() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum Study {
    Nulldist(NulldistGrid),
    /// Rejection rates with δ = 0 and μ = 1.
    Size(MvnGrid),
    /// Rejection rates with μ = (δ − 2, 2δ − 2, ...), plus power/size odds
    /// when δ = 0 is on the grid.
    Power(MvnGrid),
    FmiMse(MvnGrid),
    NegativeProportions(MvnGrid),
    MonotoneMcarMar(MonotoneGrid),
}

impl Study {
    pub fn tag(&self) -> &'static str {
        match self {
            Study::Nulldist(_) => "nulldist",
            Study::Size(_) => "size",
            Study::Power(_) => "power",
            Study::FmiMse(_) => "fmi_mse",
            Study::NegativeProportions(_) => "negative_proportions",
            Study::MonotoneMcarMar(_) => "monotone_mcar_mar",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub csv: Option<String>,
    pub svg: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub seed: u64,
    /// Replicates per grid point; draws per grid point for `nulldist`.
    pub replicates: usize,
    pub study: Study,
    #[serde(default)]
    pub output: OutputSpec,
}

/// A rejected configuration, located by JSON pointer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    pub pointer: String,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", if self.pointer.is_empty() { "/" } else { &self.pointer }, self.message)
    }
}

impl std::error::Error for SpecError {}

fn fail<T>(pointer: impl Into<String>, message: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError { pointer: pointer.into(), message: message.into() })
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn pointer_of<E>(prefix: &str, e: &serde_path_to_error::Error<E>) -> String {
    let mut pointer = prefix.to_string();
    for seg in e.path().iter() {
        match seg {
            serde_path_to_error::Segment::Seq { index } => pointer.push_str(&format!("/{index}")),
            serde_path_to_error::Segment::Map { key } => pointer.push_str(&format!("/{}", escape(key))),
            serde_path_to_error::Segment::Enum { .. } | serde_path_to_error::Segment::Unknown => {}
        }
    }
    pointer
}

fn grid<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Result<T, SpecError> {
    serde_path_to_error::deserialize(v).map_err(|e| SpecError { pointer: pointer_of("/study", &e), message: e.inner().to_string() })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    seed: u64,
    replicates: usize,
    study: serde_json::Value,
    #[serde(default)]
    output: OutputSpec,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawSpec = serde_path_to_error::deserialize(de)
            .map_err(|e| SpecError { pointer: pointer_of("", &e), message: e.inner().to_string() })?;
        let mut body = raw.study;
        let Some(obj) = body.as_object_mut() else {
            return fail("/study", "expected an object");
        };
        let tag = match obj.remove("experiment") {
            Some(serde_json::Value::String(t)) => t,
            Some(_) => return fail("/study/experiment", "expected a string"),
            None => return fail("/study", "missing field `experiment`"),
        };
        let study = match tag.as_str() {
            "nulldist" => Study::Nulldist(grid(body)?),
            "size" => Study::Size(grid(body)?),
            "power" => Study::Power(grid(body)?),
            "fmi_mse" => Study::FmiMse(grid(body)?),
            "negative_proportions" => Study::NegativeProportions(grid(body)?),
            "monotone_mcar_mar" => Study::MonotoneMcarMar(grid(body)?),
            other => return fail("/study/experiment", format!("unknown experiment {other:?}")),
        };
        let spec = ExperimentSpec { seed: raw.seed, replicates: raw.replicates, study, output: raw.output };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.replicates == 0 {
            return fail("/replicates", "must be at least 1");
        }
        match &self.study {
            Study::Nulldist(g) => validate_nulldist(g),
            Study::Size(g) | Study::Power(g) | Study::FmiMse(g) | Study::NegativeProportions(g) => validate_mvn(g),
            Study::MonotoneMcarMar(g) => validate_monotone(g),
        }
    }
}

fn nonempty<T>(v: &[T], ptr: &str) -> Result<(), SpecError> {
    if v.is_empty() {
        return fail(ptr, "grid axis is empty");
    }
    Ok(())
}

fn each<T: Copy>(v: &[T], ptr: &str, ok: impl Fn(T) -> bool, what: &str) -> Result<(), SpecError> {
    nonempty(v, ptr)?;
    match v.iter().position(|&x| !ok(x)) {
        Some(i) => fail(format!("{ptr}/{i}"), what.to_string()),
        None => Ok(()),
    }
}

fn alpha_ok(a: f64) -> bool {
    a > 0.0 && a < 1.0
}

fn validate_nulldist(g: &NulldistGrid) -> Result<(), SpecError> {
    each(&g.m, "/study/m", |m| m >= 2, "m must be at least 2")?;
    each(&g.k, "/study/k", |k| k >= 1, "k must be at least 1")?;
    each(&g.tau, "/study/tau", |t| t >= 1, "tau must be at least 1")?;
    each(&g.f_m, "/study/f_m", |f| (0.0..1.0).contains(&f), "f_m must lie in [0, 1)")?;
    each(&g.alpha, "/study/alpha", alpha_ok, "alpha must lie in (0, 1)")
}

fn validate_mvn(g: &MvnGrid) -> Result<(), SpecError> {
    each(&g.n, "/study/n", |n| n >= 4, "n must be at least 4")?;
    each(&g.m, "/study/m", |m| m >= 2, "m must be at least 2")?;
    each(&g.p, "/study/p", |p| p >= 2, "p must be at least 2")?;
    each(&g.f, "/study/f", |f| (0.0..1.0).contains(&f), "f must lie in [0, 1)")?;
    each(&g.delta, "/study/delta", f64::is_finite, "delta must be finite")?;
    each(&g.alpha, "/study/alpha", alpha_ok, "alpha must lie in (0, 1)")?;
    nonempty(&g.params, "/study/params")?;
    nonempty(&g.methods, "/study/methods")?;
    if !(g.sigma2 > 0.0) {
        return fail("/study/sigma2", "must be positive");
    }
    for &p in &g.p {
        if let Some(j) = g.rho.iter().position(|&r| !(r < 1.0 && r > -1.0 / (p as f64 - 1.0))) {
            return fail(format!("/study/rho/{j}"), format!("not a valid exchangeable correlation for p = {p}"));
        }
    }
    for &p in &g.p {
        for &n in &g.n {
            for &f in &g.f {
                let n_obs = ((1.0 - f) * n as f64 + 1e-9).floor() as usize;
                if n_obs <= p + 1 {
                    return fail("/study/f", format!("n = {n}, f = {f} leaves {n_obs} observed rows, too few for p = {p}"));
                }
            }
        }
    }
    if let Some(i) = g.methods.iter().position(|m| matches!(m, Procedure::Benchmark(Benchmark::C1))) {
        return fail(format!("/study/methods/{i}"), "C1 needs the complete data, which only the monotone study keeps");
    }
    if g.null_approx == Some(NullApprox::Proposed) {
        if let Some(i) = g.methods.iter().position(|m| matches!(m, Procedure::Test(t) if !t.has_proposed())) {
            return fail(format!("/study/methods/{i}"), "method has no proposed null approximation");
        }
    }
    Ok(())
}

fn validate_monotone(g: &MonotoneGrid) -> Result<(), SpecError> {
    if g.p < 2 {
        return fail("/study/p", "must be at least 2");
    }
    if g.n < 2 * g.p {
        return fail("/study/n", "too few rows for the number of variables");
    }
    each(&g.m, "/study/m", |m| m >= 2, "m must be at least 2")?;
    each(&g.delta, "/study/delta", f64::is_finite, "delta must be finite")?;
    each(&g.alpha, "/study/alpha", alpha_ok, "alpha must lie in (0, 1)")?;
    nonempty(&g.mechanisms, "/study/mechanisms")?;
    if let Some(i) = g.mechanisms.iter().position(|a| !(a[0].is_finite() && a[1].is_finite())) {
        return fail(format!("/study/mechanisms/{i}"), "coefficients must be finite");
    }
    nonempty(&g.methods, "/study/methods")?;
    if let Some(i) = g.methods.iter().position(|m| matches!(m, Procedure::Test(t) if t.is_wald())) {
        return fail(format!("/study/methods/{i}"), "the monotone study runs likelihood ratio tests only");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{"seed": 1, "replicates": 10,
        "study": {"experiment": "power", "n": [100], "m": [3], "delta": [0, 1], "methods": ["L-5", "W-1"], "params": ["ii"]}}"#;

    #[test]
    fn parses() {
        let s = ExperimentSpec::from_json(GOOD).unwrap();
        let Study::Power(g) = &s.study else { panic!() };
        assert_eq!(g.methods, vec![Procedure::Test(Method::L5), Procedure::Test(Method::W1)]);
        assert_eq!(g.alpha, vec![0.005, 0.05]);
    }

    #[test]
    fn empty_axis_points_at_field() {
        let bad = GOOD.replace(r#""m": [3]"#, r#""m": []"#);
        assert_eq!(ExperimentSpec::from_json(&bad).unwrap_err().pointer, "/study/m");
    }

    #[test]
    fn type_error_points_at_element() {
        let bad = GOOD.replace(r#""delta": [0, 1]"#, r#""delta": [0, "x"]"#);
        assert_eq!(ExperimentSpec::from_json(&bad).unwrap_err().pointer, "/study/delta/1");
    }

    #[test]
    fn unknown_method_rejected() {
        let bad = GOOD.replace("W-1", "W-9");
        assert!(ExperimentSpec::from_json(&bad).unwrap_err().pointer.starts_with("/study/methods"));
    }
}

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One long-form row: where on the grid, which procedure, which metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub point: Vec<(String, f64)>,
    pub method: String,
    pub param: String,
    pub metric: String,
    pub value: f64,
    /// Monte Carlo standard error; zero for counts.
    pub mc_se: f64,
    /// Replicates (or draws) behind the value.
    pub count: usize,
}

impl Record {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.point.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub experiment: String,
    pub seed: u64,
    pub replicates: usize,
    pub records: Vec<Record>,
}

impl ExperimentResult {
    /// Records matching a metric, method and every given grid coordinate.
    pub fn select<'a>(&'a self, metric: &'a str, method: &'a str, at: &'a [(&'a str, f64)]) -> impl Iterator<Item = &'a Record> + 'a {
        self.records.iter().filter(move |r| {
            r.metric == metric && r.method == method && at.iter().all(|(k, v)| r.get(k).is_some_and(|x| (x - v).abs() < 1e-12))
        })
    }

    /// Write the records as CSV with one column per grid coordinate.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut keys: Vec<String> = Vec::new();
        for r in &self.records {
            for (k, _) in &r.point {
                if !keys.contains(k) {
                    keys.push(k.clone());
                }
            }
        }
        let mut header = vec!["experiment".to_string()];
        header.extend(keys.iter().cloned());
        header.extend(["method", "param", "metric", "value", "mc_se", "count"].map(String::from));
        let io = |e: csv::Error| Error::InvalidArgument(e.to_string());
        w.write_record(&header).map_err(io)?;
        for r in &self.records {
            let mut row = vec![self.experiment.clone()];
            for k in &keys {
                row.push(r.get(k).map(|v| format!("{v}")).unwrap_or_default());
            }
            row.extend([r.method.clone(), r.param.clone(), r.metric.clone(), format!("{}", r.value), format!("{}", r.mc_se), r.count.to_string()]);
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(e.to_string()))
    }
}

/// Proportion and its binomial standard error √(p̂(1 − p̂)/R).
pub fn rate(hits: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = hits as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

/// Mean and its standard error.
pub fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_se() {
        let (p, se) = rate(25, 100);
        assert_eq!(p, 0.25);
        assert!((se - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn csv_has_point_columns() {
        let r = ExperimentResult {
            experiment: "x".into(),
            seed: 0,
            replicates: 1,
            records: vec![Record {
                point: vec![("m".into(), 3.0)],
                method: "L-5".into(),
                param: "-".into(),
                metric: "reject".into(),
                value: 0.1,
                mc_se: 0.01,
                count: 10,
            }],
        };
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "experiment,m,method,param,metric,value,mc_se,count\nx,3,L-5,-,reject,0.1,0.01,10\n");
    }
}

//! CSV layouts.
//!
//! Long format: a `.imp` column followed by numeric columns. Block 0 is the
//! observed view (missing entries written as `NA`), blocks 1..=m are the
//! completed datasets. Counts: one row per cell, three label columns and a
//! `count` column, with `?` in the first label column for units whose
//! first-axis level is unknown. An optional leading `.imp` column gives
//! completed tables in the same way as the long format.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::imputers::{CompletedDatasets, MissingPattern, PartialTable, PatternTag, Provenance};
use crate::models::CountTable;
use crate::numkit::Matrix;

pub const IMP: &str = ".imp";
pub const MISSING: &str = "NA";
pub const UNKNOWN: &str = "?";

fn csv_err(e: csv::Error) -> Error {
    match e.position() {
        Some(p) => Error::InvalidArgument(format!("line {}: {e}", p.line())),
        None => Error::InvalidArgument(e.to_string()),
    }
}

fn at(line: u64, col: usize, msg: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("line {line}, column {}: {msg}", col + 1))
}

fn fmt_value(v: f64) -> String {
    if v.is_nan() { MISSING.to_string() } else { format!("{v}") }
}

fn parse_value(s: &str, line: u64, col: usize) -> Result<f64> {
    let s = s.trim();
    if s == MISSING || s.is_empty() {
        return Ok(f64::NAN);
    }
    s.parse::<f64>().map_err(|_| at(line, col, format!("not a number: {s:?}")))
}

/// A parsed long-format file.
#[derive(Debug, Clone, PartialEq)]
pub struct LongTable {
    pub names: Vec<String>,
    pub observed: Option<Matrix>,
    pub imputations: Vec<Matrix>,
}

impl LongTable {
    /// Completed datasets with the observed view attached when present.
    pub fn into_completed(self) -> Result<CompletedDatasets<Matrix>> {
        let pattern = match &self.observed {
            Some(o) => MissingPattern::of(o, PatternTag::BlockRows),
            None => {
                let first = self.imputations.first().ok_or_else(|| Error::InvalidArgument("no rows".into()))?;
                MissingPattern::of(first, PatternTag::BlockRows)
            }
        };
        let provenance = Provenance { imputer: "file".into(), seed: 0, stream: 0 };
        let done = CompletedDatasets::new(self.imputations, pattern, provenance)?;
        Ok(match self.observed {
            Some(o) => done.with_observed(o),
            None => done,
        })
    }
}

pub fn write_long<W: Write>(out: W, names: &[String], data: &CompletedDatasets<Matrix>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![IMP.to_string()];
    header.extend(names.iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    let mut block = |idx: usize, x: &Matrix| -> Result<()> {
        if x.cols() != names.len() {
            return Err(Error::DimensionMismatch(format!("{} names for {} columns", names.len(), x.cols())));
        }
        for i in 0..x.rows() {
            let mut rec = vec![idx.to_string()];
            rec.extend(x.row(i).iter().map(|&v| fmt_value(v)));
            w.write_record(&rec).map_err(csv_err)?;
        }
        Ok(())
    };
    if let Some(o) = &data.observed {
        block(0, o)?;
    }
    for (l, x) in data.datasets.iter().enumerate() {
        block(l + 1, x)?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(e.to_string()))
}

/// Parse a long-format file. A file without a `.imp` column is read as a
/// single observed block.
pub fn read_long<R: Read>(input: R) -> Result<LongTable> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let imp_col = header.iter().position(|h| h == IMP);
    let names: Vec<String> = header.iter().filter(|h| h.as_str() != IMP).cloned().collect();
    if names.is_empty() {
        return Err(at(1, 0, "no data columns"));
    }
    let mut blocks: BTreeMap<usize, Vec<Vec<f64>>> = BTreeMap::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let mut idx = 0usize;
        let mut row = Vec::with_capacity(names.len());
        for (c, field) in rec.iter().enumerate() {
            if Some(c) == imp_col {
                idx = field.trim().parse().map_err(|_| at(line, c, format!("bad imputation index {field:?}")))?;
            } else {
                row.push(parse_value(field, line, c)?);
            }
        }
        blocks.entry(idx).or_default().push(row);
    }
    let observed = blocks.remove(&0).map(|rows| Matrix::from_rows(&rows)).transpose()?;
    let keys: Vec<usize> = blocks.keys().copied().collect();
    if keys.iter().enumerate().any(|(i, &k)| k != i + 1) {
        return Err(Error::InvalidArgument(format!("imputation indices must be 1..=m, got {keys:?}")));
    }
    let imputations: Vec<Matrix> = blocks.into_values().map(|rows| Matrix::from_rows(&rows)).collect::<Result<_>>()?;
    if let Some(first) = imputations.first() {
        let same = imputations.iter().all(|x| x.rows() == first.rows());
        let obs_ok = observed.as_ref().is_none_or(|o| o.rows() == first.rows());
        if !same || !obs_ok {
            return Err(Error::InvalidArgument("imputation blocks differ in row count".into()));
        }
    }
    if let Some(o) = &observed {
        for (l, x) in imputations.iter().enumerate() {
            let kept = x.as_slice().iter().zip(o.as_slice()).all(|(a, b)| b.is_nan() || a.to_bits() == b.to_bits());
            if !kept {
                return Err(Error::InvalidArgument(format!("imputation {} changes observed entries", l + 1)));
            }
        }
    }
    Ok(LongTable { names, observed, imputations })
}

/// Level names of a count file, per axis, in order of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct CountLayout {
    pub axes: [String; 3],
    pub levels: [Vec<String>; 3],
}

/// Either a table with some unknown first-axis labels, or already completed tables.
#[derive(Debug, Clone, PartialEq)]
pub enum CountData {
    Partial(PartialTable),
    Completed { observed: Option<CountTable>, tables: Vec<CountTable> },
}

pub fn read_counts<R: Read>(input: R) -> Result<(CountLayout, CountData)> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let imp_col = header.iter().position(|h| h == IMP);
    let label_cols: Vec<usize> = (0..header.len()).filter(|&c| Some(c) != imp_col && header[c] != "count").collect();
    let count_col = header.iter().position(|h| h == "count").ok_or_else(|| at(1, header.len(), "missing count column"))?;
    if label_cols.len() != 3 {
        return Err(at(1, 0, format!("expected three label columns, found {}", label_cols.len())));
    }
    let axes = [header[label_cols[0]].clone(), header[label_cols[1]].clone(), header[label_cols[2]].clone()];
    let mut levels: [Vec<String>; 3] = Default::default();
    let mut rows: Vec<(usize, [Option<usize>; 3], f64, u64)> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let idx = match imp_col {
            Some(c) => rec[c].parse().map_err(|_| at(line, c, format!("bad imputation index {:?}", &rec[c])))?,
            None => 0,
        };
        let mut lab = [None; 3];
        for (a, &c) in label_cols.iter().enumerate() {
            let v = &rec[c];
            if v == UNKNOWN {
                if a != 0 {
                    return Err(at(line, c, "only the first axis may be unknown"));
                }
                continue;
            }
            let pos = match levels[a].iter().position(|l| l == v) {
                Some(p) => p,
                None => {
                    levels[a].push(v.to_string());
                    levels[a].len() - 1
                }
            };
            lab[a] = Some(pos);
        }
        let count: f64 = rec[count_col].parse().map_err(|_| at(line, count_col, format!("bad count {:?}", &rec[count_col])))?;
        if !(count >= 0.0) || count.fract() != 0.0 {
            return Err(at(line, count_col, "counts must be nonnegative integers"));
        }
        rows.push((idx, lab, count, line));
    }
    let dims = [levels[0].len(), levels[1].len(), levels[2].len()];
    if dims.contains(&0) {
        return Err(Error::InvalidArgument("every axis needs at least one level".into()));
    }
    let empty = || CountTable { dims, counts: vec![0.0; dims.iter().product()] };
    let mut blocks: BTreeMap<usize, CountTable> = BTreeMap::new();
    let mut unlabeled = vec![0.0; dims[1] * dims[2]];
    for (idx, lab, count, line) in rows {
        let (j, k) = (lab[1].expect("checked"), lab[2].expect("checked"));
        match lab[0] {
            Some(i) => {
                let t = blocks.entry(idx).or_insert_with(empty);
                let c = t.index(i, j, k);
                t.counts[c] += count;
            }
            None if idx == 0 => unlabeled[j * dims[2] + k] += count,
            None => return Err(at(line, 0, "completed tables cannot have unknown labels")),
        }
    }
    let layout = CountLayout { axes, levels };
    if imp_col.is_none() {
        let labeled = blocks.remove(&0).unwrap_or_else(empty);
        return Ok((layout, CountData::Partial(PartialTable::new(labeled, unlabeled)?)));
    }
    let observed = blocks.remove(&0);
    let tables: Vec<CountTable> = blocks.into_values().collect();
    Ok((layout, CountData::Completed { observed, tables }))
}

pub fn write_counts<W: Write>(out: W, layout: &CountLayout, tables: &[CountTable]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![IMP.to_string()];
    header.extend(layout.axes.iter().cloned());
    header.push("count".into());
    w.write_record(&header).map_err(csv_err)?;
    for (l, t) in tables.iter().enumerate() {
        for i in 0..t.dims[0] {
            for j in 0..t.dims[1] {
                for k in 0..t.dims[2] {
                    w.write_record([
                        (l + 1).to_string(),
                        layout.levels[0][i].clone(),
                        layout.levels[1][j].clone(),
                        layout.levels[2][k].clone(),
                        fmt_value(t.get(i, j, k)),
                    ])
                    .map_err(csv_err)?;
                }
            }
        }
    }
    w.flush().map_err(|e| Error::InvalidArgument(e.to_string()))
}

use serde::{Deserialize, Serialize};

use super::{CompletedDatasets, MissingPattern, PatternTag, Provenance};
use crate::error::{Error, Result};
use crate::models::CountTable;
use crate::numkit::sample::{categorical, dirichlet};
use crate::numkit::RngStream;

/// A three-way table whose axis-0 label is missing for some units.
/// `unlabeled[j * d2 + k]` counts units seen at levels (j, k) of axes 1 and 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialTable {
    pub labeled: CountTable,
    pub unlabeled: Vec<f64>,
}

impl PartialTable {
    pub fn new(labeled: CountTable, unlabeled: Vec<f64>) -> Result<Self> {
        let [_, b, c] = labeled.dims;
        if unlabeled.len() != b * c {
            return Err(Error::DimensionMismatch(format!("{} unlabeled cells for {b}x{c}", unlabeled.len())));
        }
        if unlabeled.iter().any(|&u| !(u >= 0.0) || u.fract() != 0.0) {
            return Err(Error::InvalidArgument("unlabeled counts must be nonnegative integers".into()));
        }
        Ok(Self { labeled, unlabeled })
    }

    /// The care-survival data: axes are (clinic, care, survival), with the
    /// clinic unrecorded for 255 infants.
    pub fn care_survival() -> Self {
        let labeled = CountTable { dims: [2, 2, 2], counts: vec![3.0, 176.0, 4.0, 293.0, 17.0, 197.0, 2.0, 23.0] };
        Self { labeled, unlabeled: vec![10.0, 150.0, 5.0, 90.0] }
    }
}

/// Allocate `count` units among the levels of axis 0 with the given
/// conditional probabilities, returning the per-level counts.
pub(crate) fn allocate(count: usize, probs: &[f64], rng: &mut RngStream) -> Result<Vec<f64>> {
    let mut out = vec![0.0; probs.len()];
    for _ in 0..count {
        out[categorical(probs, rng)?] += 1.0;
    }
    Ok(out)
}

/// Multiple imputation of the missing axis-0 labels.
///
/// Each imputation draws cell probabilities π from Dirichlet(n + ½) on the
/// labeled counts, then sends every unlabeled unit at (j, k) to level i with
/// probability π_ijk / Σ_i' π_i'jk.
pub fn impute_multinomial_dirichlet(
    table: &PartialTable,
    m: usize,
    rng: &mut RngStream,
) -> Result<CompletedDatasets<CountTable>> {
    let labeled = &table.labeled;
    let [a, b, c] = labeled.dims;
    if !(labeled.total() > 0.0) {
        return Err(Error::DegenerateData("no labeled units".into()));
    }
    let pattern = MissingPattern {
        rows: b * c,
        cols: 1,
        mask: table.unlabeled.iter().map(|&u| u == 0.0).collect(),
        tag: PatternTag::CellLabels,
    };
    let provenance = Provenance { imputer: "multinomial_dirichlet".into(), seed: rng.seed(), stream: rng.stream() };
    let alpha: Vec<f64> = labeled.counts.iter().map(|n| n + 0.5).collect();
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let pi = if table.unlabeled.iter().any(|&u| u > 0.0) { dirichlet(&alpha, rng)? } else { Vec::new() };
        let mut done = labeled.clone();
        for j in 0..b {
            for k in 0..c {
                let u = table.unlabeled[j * c + k] as usize;
                if u == 0 {
                    continue;
                }
                let probs: Vec<f64> = (0..a).map(|i| pi[labeled.index(i, j, k)]).collect();
                for (i, add) in allocate(u, &probs, rng)?.into_iter().enumerate() {
                    let idx = labeled.index(i, j, k);
                    done.counts[idx] += add;
                }
            }
        }
        out.push(done);
    }
    Ok(CompletedDatasets::new(out, pattern, provenance)?.with_observed(labeled.clone()))
}

//! Proper Bayesian imputers and the data generators used by the studies.
//!
//! Missing entries of a numeric dataset are NaN. Every imputer copies the
//! observed entries bit for bit into each of the `m` completed datasets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::Matrix;

mod generate;
mod monotone;
mod mvn_jeffreys;
mod table;

pub use generate::{generate_monotone_data, generate_mvn_experiment_data, MonotoneConfig, MonotoneData, MvnConfig, MvnTruth};
pub use monotone::impute_monotone_regression;
pub use mvn_jeffreys::impute_mvn_jeffreys;
pub use table::{impute_multinomial_dirichlet, PartialTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternTag {
    BlockRows,
    Monotone,
    CellLabels,
}

/// Which entries were observed (`true`) in an `n × p` layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingPattern {
    pub rows: usize,
    pub cols: usize,
    pub mask: Vec<bool>,
    pub tag: PatternTag,
}

impl MissingPattern {
    pub fn of(x: &Matrix, tag: PatternTag) -> Self {
        Self { rows: x.rows(), cols: x.cols(), mask: x.as_slice().iter().map(|v| !v.is_nan()).collect(), tag }
    }

    pub fn observed(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.cols + j]
    }

    pub fn missing_count(&self) -> usize {
        self.mask.iter().filter(|&&o| !o).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub imputer: String,
    pub seed: u64,
    pub stream: u64,
}

/// The `m` completed copies of one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletedDatasets<D> {
    pub datasets: Vec<D>,
    pub pattern: MissingPattern,
    pub provenance: Provenance,
    /// The observed-only view, when the imputer had one.
    pub observed: Option<D>,
}

impl<D> CompletedDatasets<D> {
    pub fn new(datasets: Vec<D>, pattern: MissingPattern, provenance: Provenance) -> Result<Self> {
        if datasets.is_empty() {
            return Err(Error::InvalidArgument("no completed datasets".into()));
        }
        Ok(Self { datasets, pattern, provenance, observed: None })
    }

    /// Wrap datasets that carry no missingness record.
    pub fn from_datasets(datasets: Vec<D>) -> Result<Self> {
        Self::new(
            datasets,
            MissingPattern { rows: 0, cols: 0, mask: Vec::new(), tag: PatternTag::BlockRows },
            Provenance { imputer: "external".into(), seed: 0, stream: 0 },
        )
    }

    pub fn with_observed(mut self, observed: D) -> Self {
        self.observed = Some(observed);
        self
    }

    pub fn m(&self) -> usize {
        self.datasets.len()
    }
}

/// Check that every completed matrix agrees with `obs` on its observed cells.
pub fn observed_entries_preserved(obs: &Matrix, done: &CompletedDatasets<Matrix>) -> bool {
    done.datasets.iter().all(|x| {
        x.as_slice().iter().zip(obs.as_slice()).all(|(a, b)| b.is_nan() || a.to_bits() == b.to_bits())
    })
}

pub(crate) fn observed_rows(x: &Matrix) -> Vec<usize> {
    (0..x.rows()).filter(|&i| x.row(i).iter().all(|v| !v.is_nan())).collect()
}

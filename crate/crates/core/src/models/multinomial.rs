//! Three-way contingency tables with multinomial sampling.
//!
//! ψ holds every cell probability in row-major order over the three axes, so
//! its length is one more than h. Parametrization (ii) is the cellwise logit
//! and (iii) divides each cell by the matching cell at the first level of
//! axis 0. The log-likelihood Σ n_c log π_c is evaluated for any positive π,
//! normalized or not, because back-transformed averages of (ii) or (iii)
//! coordinates need not sum to one.

use serde::{Deserialize, Serialize};

use super::{check_len, Block, Constraint, LikelihoodModel, Param};
use crate::error::{Error, Result};

/// Cell counts of a `d0 × d1 × d2` table, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    pub dims: [usize; 3],
    pub counts: Vec<f64>,
}

impl CountTable {
    pub fn new(dims: [usize; 3], counts: Vec<f64>) -> Result<Self> {
        if dims.iter().product::<usize>() != counts.len() {
            return Err(Error::DimensionMismatch(format!("{} counts for dims {dims:?}", counts.len())));
        }
        if counts.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) {
            return Err(Error::InvalidArgument("counts must be finite and nonnegative".into()));
        }
        Ok(Self { dims, counts })
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.counts[self.index(i, j, k)]
    }

    fn cells(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        let [a, b, c] = self.dims;
        (0..a).flat_map(move |i| (0..b).flat_map(move |j| (0..c).map(move |k| [i, j, k])))
    }
}

/// Null hypothesis for the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TableNull {
    /// All three axes mutually independent.
    Mutual,
    /// The two other axes independent given axis `given`.
    Conditional { given: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultinomialModel {
    dims: [usize; 3],
    null: TableNull,
}

impl MultinomialModel {
    pub fn new(dims: [usize; 3], null: TableNull) -> Result<Self> {
        if dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidArgument(format!("every axis needs at least two levels, got {dims:?}")));
        }
        if let TableNull::Conditional { given } = null {
            if given > 2 {
                return Err(Error::InvalidArgument(format!("axis {given} out of range")));
            }
        }
        Ok(Self { dims, null })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn null(&self) -> TableNull {
        self.null
    }

    fn cells(&self) -> usize {
        self.dims.iter().product()
    }

    fn check_table(&self, x: &CountTable) -> Result<()> {
        if x.dims != self.dims {
            return Err(Error::DimensionMismatch(format!("table dims {:?} vs model {:?}", x.dims, self.dims)));
        }
        Ok(())
    }

    fn margin(x: &CountTable, keep: &[usize]) -> Vec<f64> {
        let sizes: Vec<usize> = keep.iter().map(|&a| x.dims[a]).collect();
        let mut out = vec![0.0; sizes.iter().product()];
        for cell in x.cells() {
            let mut idx = 0;
            for (&a, &s) in keep.iter().zip(&sizes) {
                idx = idx * s + cell[a];
            }
            out[idx] += x.counts[x.index(cell[0], cell[1], cell[2])];
        }
        out
    }
}

impl LikelihoodModel for MultinomialModel {
    type Data = CountTable;

    fn tag(&self) -> &'static str {
        "multinomial"
    }

    fn h(&self) -> usize {
        self.cells() - 1
    }

    fn k(&self) -> usize {
        let [a, b, c] = self.dims;
        match self.null {
            TableNull::Mutual => a * b * c - 1 - (a - 1) - (b - 1) - (c - 1),
            TableNull::Conditional { given } => {
                let others: Vec<usize> = (0..3).filter(|&x| x != given).map(|x| self.dims[x]).collect();
                self.dims[given] * (others[0] - 1) * (others[1] - 1)
            }
        }
    }

    fn layout(&self) -> Vec<Block> {
        vec![Block { name: "cell_probabilities", len: self.cells() }]
    }

    fn null_tag(&self) -> String {
        match self.null {
            TableNull::Mutual => "mutual_independence".into(),
            TableNull::Conditional { given } => format!("conditional_independence_given_{given}"),
        }
    }

    fn loglik(&self, psi: &[f64], x: &CountTable) -> Result<f64> {
        self.check_table(x)?;
        check_len(psi, self.cells(), "multinomial")?;
        let mut s = 0.0;
        for (&n, &p) in x.counts.iter().zip(psi) {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidParameter(format!("cell probability {p}")));
            }
            if n > 0.0 {
                if p == 0.0 {
                    return Err(Error::InvalidParameter("zero probability on an occupied cell".into()));
                }
                s += n * p.ln();
            }
        }
        Ok(s)
    }

    fn mle(&self, x: &CountTable, c: Constraint) -> Result<Vec<f64>> {
        self.check_table(x)?;
        let n = x.total();
        if !(n > 0.0) {
            return Err(Error::DegenerateData("empty table".into()));
        }
        match c {
            Constraint::Free => Ok(x.counts.iter().map(|&v| v / n).collect()),
            Constraint::Null => {
                let mut pi = vec![0.0; self.cells()];
                match self.null {
                    TableNull::Mutual => {
                        let m: Vec<Vec<f64>> = (0..3).map(|a| Self::margin(x, &[a])).collect();
                        for cell in x.cells() {
                            pi[x.index(cell[0], cell[1], cell[2])] =
                                m[0][cell[0]] * m[1][cell[1]] * m[2][cell[2]] / (n * n * n);
                        }
                    }
                    TableNull::Conditional { given: g } => {
                        let others: Vec<usize> = (0..3).filter(|&a| a != g).collect();
                        let (a, b) = (others[0], others[1]);
                        let ga = Self::margin(x, &[g, a]);
                        let gb = Self::margin(x, &[g, b]);
                        let gm = Self::margin(x, &[g]);
                        for cell in x.cells() {
                            let ng = gm[cell[g]];
                            let idx = x.index(cell[0], cell[1], cell[2]);
                            pi[idx] = if ng > 0.0 {
                                ga[cell[g] * self.dims[a] + cell[a]] * gb[cell[g] * self.dims[b] + cell[b]] / (ng * n)
                            } else {
                                0.0
                            };
                        }
                    }
                }
                Ok(pi)
            }
        }
    }

    fn stack(&self, xs: &[CountTable]) -> Result<CountTable> {
        let mut out = CountTable { dims: self.dims, counts: vec![0.0; self.cells()] };
        for x in xs {
            self.check_table(x)?;
            for (o, v) in out.counts.iter_mut().zip(&x.counts) {
                *o += v;
            }
        }
        Ok(out)
    }

    fn psi_forward(&self, psi: &[f64], map: Param) -> Result<Vec<f64>> {
        check_len(psi, self.cells(), "multinomial")?;
        match map {
            Param::I => Ok(psi.to_vec()),
            Param::Ii => psi
                .iter()
                .map(|&p| {
                    if p > 0.0 && p < 1.0 {
                        Ok((p / (1.0 - p)).ln())
                    } else {
                        Err(Error::InvalidParameter(format!("logit of {p}")))
                    }
                })
                .collect(),
            Param::Iii => {
                let slab = self.dims[1] * self.dims[2];
                let mut out = psi.to_vec();
                for (idx, o) in out.iter_mut().enumerate().skip(slab) {
                    let base = psi[idx % slab];
                    if !(base > 0.0) {
                        return Err(Error::InvalidParameter("ratio against a zero probability".into()));
                    }
                    *o = psi[idx] / base;
                }
                Ok(out)
            }
        }
    }

    fn psi_inverse(&self, phi: &[f64], map: Param) -> Result<Vec<f64>> {
        check_len(phi, self.cells(), "multinomial")?;
        match map {
            Param::I => Ok(phi.to_vec()),
            Param::Ii => Ok(phi.iter().map(|&z| 1.0 / (1.0 + (-z).exp())).collect()),
            Param::Iii => {
                let slab = self.dims[1] * self.dims[2];
                Ok(phi.iter().enumerate().map(|(idx, &v)| if idx < slab { v } else { v * phi[idx % slab] }).collect())
            }
        }
    }
}

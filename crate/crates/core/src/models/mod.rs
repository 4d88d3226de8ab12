//! Complete-data likelihood models.
//!
//! A model knows its log-likelihood, how to maximize it with or without the
//! null restriction, and how to stack several completed datasets into one.
//! Everything the combining rules need is derived from those pieces.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::Matrix;

pub mod ar1;
pub mod multinomial;
pub mod mvn;

pub use ar1::{Ar1Model, Series};
pub use multinomial::{CountTable, MultinomialModel, TableNull};
pub use mvn::{MeanNull, MvnModel};

/// Which maximization to perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constraint {
    Free,
    Null,
}

/// Parametrization tag. Each model documents what (i), (ii) and (iii)
/// mean for its ψ and, where Wald components exist, for its θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    I,
    Ii,
    Iii,
}

impl Param {
    pub const ALL: [Param; 3] = [Param::I, Param::Ii, Param::Iii];

    pub fn label(&self) -> &'static str {
        match self {
            Param::I => "i",
            Param::Ii => "ii",
            Param::Iii => "iii",
        }
    }
}

impl std::str::FromStr for Param {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(Param::I),
            "ii" | "2" => Ok(Param::Ii),
            "iii" | "3" => Ok(Param::Iii),
            other => Err(Error::InvalidArgument(format!("unknown parametrization {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// A named block of the parameter vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    pub name: &'static str,
    pub len: usize,
}

/// The tested restriction: `k` constraints with θ = θ0 under the null.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimandSpec {
    pub k: usize,
    pub theta0: Vec<f64>,
    pub null: String,
}

/// θ̂ and its estimated covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct WaldComponents {
    pub theta_hat: Vec<f64>,
    pub u: Matrix,
}

pub trait LikelihoodModel: Send + Sync {
    type Data: Clone + Debug + PartialEq + Send + Sync;

    fn tag(&self) -> &'static str;

    /// Dimension of the free parameter.
    fn h(&self) -> usize;

    /// Number of restrictions imposed by the null.
    fn k(&self) -> usize;

    fn layout(&self) -> Vec<Block>;

    fn null_tag(&self) -> String;

    fn estimand(&self) -> EstimandSpec {
        EstimandSpec { k: self.k(), theta0: vec![0.0; self.k()], null: self.null_tag() }
    }

    /// Log-density up to an additive constant that depends on neither ψ nor
    /// the data values.
    fn loglik(&self, psi: &[f64], x: &Self::Data) -> Result<f64>;

    fn mle(&self, x: &Self::Data, c: Constraint) -> Result<Vec<f64>>;

    /// Concatenate datasets in order.
    fn stack(&self, xs: &[Self::Data]) -> Result<Self::Data>;

    /// Maximizer of the average log-likelihood over `xs`. For models with
    /// independent rows this is the MLE on the stacked data.
    fn averaged_mle(&self, xs: &[Self::Data], c: Constraint) -> Result<Vec<f64>> {
        self.mle(&self.stack(xs)?, c)
    }

    fn averaged_loglik(&self, psi: &[f64], xs: &[Self::Data]) -> Result<f64> {
        let mut s = 0.0;
        for x in xs {
            s += self.loglik(psi, x)?;
        }
        Ok(s / xs.len() as f64)
    }

    /// Twice the maximized log-likelihood.
    fn loglik_max(&self, x: &Self::Data, c: Constraint) -> Result<f64> {
        Ok(2.0 * self.loglik(&self.mle(x, c)?, x)?)
    }

    /// Complete-data likelihood ratio statistic.
    fn lrt_stat(&self, x: &Self::Data) -> Result<f64> {
        Ok((self.loglik_max(x, Constraint::Free)? - self.loglik_max(x, Constraint::Null)?).max(0.0))
    }

    /// Map ψ to the coordinates of parametrization `map`.
    fn psi_forward(&self, psi: &[f64], map: Param) -> Result<Vec<f64>> {
        match map {
            Param::I => Ok(psi.to_vec()),
            _ => Err(Error::Unsupported(format!("{} has no parametrization {}", self.tag(), map.label()))),
        }
    }

    fn psi_inverse(&self, phi: &[f64], map: Param) -> Result<Vec<f64>> {
        match map {
            Param::I => Ok(phi.to_vec()),
            _ => Err(Error::Unsupported(format!("{} has no parametrization {}", self.tag(), map.label()))),
        }
    }

    /// The units of an observed-data view with nothing missing.
    fn complete_cases(&self, x: &Self::Data) -> Result<Self::Data> {
        Ok(x.clone())
    }

    fn wald(&self, _x: &Self::Data, _map: Param) -> Result<WaldComponents> {
        Err(Error::Unsupported(format!("{} has no Wald components", self.tag())))
    }
}

pub fn reparametrize<M: LikelihoodModel + ?Sized>(
    model: &M,
    psi: &[f64],
    map: Param,
    dir: Direction,
) -> Result<Vec<f64>> {
    match dir {
        Direction::Forward => model.psi_forward(psi, map),
        Direction::Inverse => model.psi_inverse(psi, map),
    }
}

pub(crate) fn check_len(psi: &[f64], want: usize, what: &str) -> Result<()> {
    if psi.len() != want {
        return Err(Error::DimensionMismatch(format!("{what}: expected {want} parameters, got {}", psi.len())));
    }
    Ok(())
}

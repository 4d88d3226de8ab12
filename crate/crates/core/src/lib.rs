//! Hypothesis tests on multiply imputed data.
//!
//! The crate pools Wald and likelihood ratio statistics computed on `m`
//! completed datasets, estimates the odds of missing information and refers
//! the pooled statistic to an F reference distribution. The stacked-data
//! routines need nothing beyond a complete-data log-likelihood maximizer.
//!
//! ```
//! use milrt::combine::{df_denominator, DfKind, Df2};
//!
//! let df = df_denominator(DfKind::New, 1.0, 5, 3).unwrap();
//! assert_eq!(df, Df2::Finite(40.0));
//! ```

pub mod combine;
pub mod error;
pub mod imputers;
pub mod io;
pub mod models;
pub mod montecarlo;
pub mod numkit;
pub mod optim;

pub use error::{Error, Result};

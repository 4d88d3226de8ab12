//! Pooling multiply imputed analyses into one test.

pub mod df;
pub mod fmi;
pub mod lrt;
pub mod moments;
pub mod nulldist;
pub mod rules;

pub use crate::numkit::Df2;
pub use df::{df_denominator, DfKind};
pub use fmi::{odds_from_gap, r_perturbation, r_wald_half, r_wald_one, r_wald_prime, DfBasis, FmiEstimate, FmiMethod};
pub use lrt::{averaged_lrt, d_hat_avg, legacy_lrt, per_dataset, stacked_lrt, AveragedLrt, LegacyLrt, PerDataset, StackedLrt};
pub use moments::{d_wt, pool_moments, PooledMoments};
pub use nulldist::{simulate_null_d, NullDistSpec, Representation};
pub use rules::{run_algorithm_plus, run_algorithm_rob, run_test, Diagnostics, Method, NullApprox, TestOptions, TestResult};

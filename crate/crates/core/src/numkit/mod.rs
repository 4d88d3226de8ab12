//! Numerical substrate: special functions, distributions, dense linear
//! algebra, reproducible random streams and samplers.

pub mod dist;
pub mod linalg;
pub mod rng;
pub mod sample;
pub mod special;

pub use dist::{ChiSquared, Continuous, Df2, FDist};
pub use linalg::{cholesky, log_det, spd_inverse, spd_solve, Cholesky, Matrix};
pub use rng::RngStream;

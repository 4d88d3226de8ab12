//! The guide in `book/`, compiled so that `cargo test` runs its code samples.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/pooling.md")]
pub mod pooling {}
#[doc = include_str!("../../../book/src/missing-information.md")]
pub mod missing_information {}
#[doc = include_str!("../../../book/src/reference-distribution.md")]
pub mod reference_distribution {}
#[doc = include_str!("../../../book/src/contingency-tables.md")]
pub mod contingency_tables {}
#[doc = include_str!("../../../book/src/writing-a-model.md")]
pub mod writing_a_model {}
#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}
#[doc = include_str!("../../../book/src/command-line.md")]
pub mod command_line {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}

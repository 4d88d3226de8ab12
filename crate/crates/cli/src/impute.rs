use std::path::PathBuf;

use clap::{Args, ValueEnum};
use milrt::imputers::{impute_monotone_regression, impute_multinomial_dirichlet, impute_mvn_jeffreys};
use milrt::io::{read_counts, read_long, write_counts, write_long, CountData};
use milrt::numkit::RngStream;
use serde::Serialize;

use crate::{emit, print_json, read_file, write_file, Failure, Format};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ImputerKind {
    /// Normal rows that are fully observed or fully missing.
    MvnJeffreys,
    /// Normal rows with a monotone missingness pattern.
    Monotone,
    /// Counts with unknown first-axis labels.
    Dirichlet,
}

#[derive(Args)]
pub struct ImputeArgs {
    /// CSV with `NA` for missing values, or a counts CSV with `?` labels.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value = "mvn-jeffreys")]
    imputer: ImputerKind,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    m: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file; long format, or counts with a `.imp` column.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

#[derive(Serialize)]
struct Summary {
    command: &'static str,
    version: &'static str,
    imputer: String,
    m: usize,
    seed: u64,
    out: String,
}

pub fn run(a: ImputeArgs) -> Result<(), Failure> {
    let text = read_file(&a.data)?;
    let m = a.m as usize;
    let mut rng = RngStream::new(a.seed, 0);
    let mut buf = Vec::new();
    let imputer = match a.imputer {
        ImputerKind::MvnJeffreys | ImputerKind::Monotone => {
            let table = read_long(text.as_bytes()).map_err(Failure::input)?;
            let observed = table
                .observed
                .ok_or_else(|| Failure::input("the data file has no observed block (`.imp` = 0 rows or no `.imp` column)"))?;
            let done = match a.imputer {
                ImputerKind::MvnJeffreys => impute_mvn_jeffreys(&observed, m, &mut rng)?,
                _ => impute_monotone_regression(&observed, m, &mut rng)?,
            };
            write_long(&mut buf, &table.names, &done)?;
            done.provenance.imputer
        }
        ImputerKind::Dirichlet => {
            let (layout, data) = read_counts(text.as_bytes()).map_err(Failure::input)?;
            let CountData::Partial(partial) = data else {
                return Err(Failure::input("the counts file is already completed (it has a `.imp` column)"));
            };
            let done = impute_multinomial_dirichlet(&partial, m, &mut rng)?;
            write_counts(&mut buf, &layout, &done.datasets)?;
            done.provenance.imputer
        }
    };
    write_file(&a.out, &buf)?;
    let summary = Summary { command: "impute", version: env!("CARGO_PKG_VERSION"), imputer, m, seed: a.seed, out: a.out.display().to_string() };
    match a.format {
        Format::Json => print_json(&summary),
        Format::Human => emit(&format!("wrote {} imputations ({}, seed {}) to {}\n", summary.m, summary.imputer, summary.seed, summary.out)),
    }
}

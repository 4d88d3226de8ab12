use std::path::{Path, PathBuf};

use clap::Args;
use milrt::montecarlo::{charts, run_experiment, ExperimentResult, ExperimentSpec, Study};
use serde::Serialize;

use crate::{emit, print_json, read_file, write_file, Failure, Format};

/// Default grid for the `nulldist` verb, at 2¹⁶ draws per point.
const NULLDIST_GRID: &str = include_str!("../../../configs/nulldist_fig1.json");

#[derive(Args)]
pub struct SimulateArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory for the CSV, charts and manifest.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads; results do not depend on this.
    #[arg(long, env = "MILRT_THREADS")]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

#[derive(Args)]
pub struct NulldistArgs {
    /// A `nulldist` experiment config; the bundled m × k × τ × f_m grid when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Draws per grid point, overriding the config.
    #[arg(long)]
    draws: Option<usize>,
    /// Seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, env = "MILRT_THREADS")]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    experiment: String,
    seed: u64,
    replicates: usize,
    threads: Option<usize>,
    records: usize,
    files: Vec<String>,
    config: ExperimentSpec,
}

fn parse_spec(text: &str) -> Result<ExperimentSpec, Failure> {
    let spec = ExperimentSpec::from_json(text).map_err(|e| Failure::input(format!("invalid config at {e}")))?;
    spec.validate().map_err(|e| Failure::input(format!("invalid config at {e}")))?;
    Ok(spec)
}

pub fn run(a: SimulateArgs) -> Result<(), Failure> {
    let spec = parse_spec(&read_file(&a.config)?)?;
    execute(spec, &a.out, a.threads, a.format)
}

pub fn run_nulldist(a: NulldistArgs) -> Result<(), Failure> {
    let text = match &a.config {
        Some(p) => read_file(p)?,
        None => NULLDIST_GRID.to_string(),
    };
    let mut spec = parse_spec(&text)?;
    if !matches!(spec.study, Study::Nulldist(_)) {
        return Err(Failure::input(format!("invalid config at /study/experiment: expected \"nulldist\", got {:?}", spec.study.tag())));
    }
    if let Some(d) = a.draws {
        spec.replicates = d;
    }
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    spec.validate().map_err(|e| Failure::input(format!("invalid option: {e}")))?;
    execute(spec, &a.out, a.threads, a.format)
}

fn execute(spec: ExperimentSpec, out: &Path, threads: Option<usize>, format: Format) -> Result<(), Failure> {
    if threads == Some(0) {
        return Err(Failure::input("--threads must be at least 1"));
    }
    let result = run_experiment(&spec, threads)?;
    let mut files = Vec::new();
    let csv_name = spec.output.csv.clone().unwrap_or_else(|| format!("{}.csv", result.experiment));
    let mut buf = Vec::new();
    result.write_csv(&mut buf)?;
    write_file(&out.join(&csv_name), &buf)?;
    files.push(csv_name);
    if let Some(dir) = &spec.output.svg {
        for (name, svg) in charts(&result) {
            let rel = Path::new(dir).join(format!("{name}.svg"));
            write_file(&out.join(&rel), svg.as_bytes())?;
            files.push(rel.display().to_string());
        }
    }
    let manifest = Manifest {
        tool: "milrt",
        version: env!("CARGO_PKG_VERSION"),
        experiment: result.experiment.clone(),
        seed: spec.seed,
        replicates: spec.replicates,
        threads,
        records: result.records.len(),
        files,
        config: spec,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Failure { code: 1, message: e.to_string() })?;
    write_file(&out.join("manifest.json"), text.as_bytes())?;
    match format {
        Format::Json => print_json(&manifest),
        Format::Human => emit(&human(&result, &manifest, out)),
    }
}

fn human(result: &ExperimentResult, manifest: &Manifest, out: &Path) -> String {
    let mut s = format!(
        "{}: {} records, seed {}, {} replicates per point\n",
        result.experiment, manifest.records, manifest.seed, manifest.replicates
    );
    for f in &manifest.files {
        s += &format!("  wrote {}\n", out.join(f).display());
    }
    s += &format!("  wrote {}\n", out.join("manifest.json").display());
    s
}

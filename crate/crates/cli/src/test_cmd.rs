use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use milrt::combine::{run_test, Df2, Method, NullApprox, TestOptions, TestResult};
use milrt::imputers::{impute_multinomial_dirichlet, CompletedDatasets};
use milrt::io::{read_counts, read_long, CountData, CountLayout};
use milrt::models::{Ar1Model, LikelihoodModel, MeanNull, MultinomialModel, MvnModel, Param, Series, TableNull};
use milrt::numkit::RngStream;
use serde::Serialize;

use crate::{emit, print_json, read_file, Failure, Format};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    /// Multivariate normal rows in long format.
    Mvn,
    /// Three-way table of counts.
    Table,
    /// A single AR(1) series per imputation, in long format.
    Ar1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DfChoice {
    Original,
    Proposed,
}

#[derive(Args)]
pub struct TestArgs {
    /// Long-format CSV, or a counts CSV for `--model table`.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value = "mvn")]
    model: ModelKind,
    /// mvn: common-mean | zero-mean. table: full-independence |
    /// conditional-independence | conditional:<axis>. ar1: white-noise.
    #[arg(long)]
    null: Option<String>,
    /// Method tags such as L-5 or W-1; repeat or separate with commas.
    #[arg(long = "method", value_delimiter = ',', default_value = "L-5")]
    methods: Vec<String>,
    /// Parametrization (i, ii or iii) for the Wald family and L-1/L-2.
    #[arg(long, default_value = "i")]
    param: String,
    /// Reference distribution; defaults to proposed where the method has one.
    #[arg(long, value_enum)]
    df: Option<DfChoice>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Imputations drawn when a counts file still has unknown labels.
    #[arg(long, default_value_t = 50)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

#[derive(Serialize)]
struct Row {
    #[serde(flatten)]
    result: TestResult,
    param: Option<Param>,
    reject: bool,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    version: &'static str,
    data: String,
    model: &'static str,
    null: String,
    m: usize,
    k: usize,
    h: usize,
    alpha: f64,
    imputed: Option<Imputed>,
    results: Vec<Row>,
}

#[derive(Serialize)]
struct Imputed {
    imputer: String,
    seed: u64,
    m: usize,
}

pub fn run(a: TestArgs) -> Result<(), Failure> {
    let methods: Vec<Method> = a.methods.iter().map(|s| Method::from_str(s).map_err(Failure::input)).collect::<Result<_, _>>()?;
    let param = Param::from_str(&a.param).map_err(Failure::input)?;
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(Failure::input(format!("--alpha {} outside (0, 1)", a.alpha)));
    }
    let opts = TestOptions {
        null_approx: a.df.map(|d| match d {
            DfChoice::Original => NullApprox::Original,
            DfChoice::Proposed => NullApprox::Proposed,
        }),
        param,
    };
    let text = read_file(&a.data)?;
    let null = a.null.as_deref();
    let report = match a.model {
        ModelKind::Mvn => {
            let done = read_long(text.as_bytes()).map_err(Failure::input)?.into_completed().map_err(Failure::input)?;
            let p = done.datasets[0].cols();
            let mean_null = match null.unwrap_or("common-mean") {
                "common-mean" => MeanNull::CommonMean,
                "zero-mean" => MeanNull::ZeroMean,
                other => return Err(Failure::input(format!("unknown null {other:?} for mvn"))),
            };
            let model = MvnModel::new(p, mean_null).map_err(Failure::incompatible)?;
            evaluate(&a, &model, &done, &methods, &opts, None)?
        }
        ModelKind::Ar1 => {
            if !matches!(null.unwrap_or("white-noise"), "white-noise") {
                return Err(Failure::input(format!("unknown null {:?} for ar1", null.unwrap_or_default())));
            }
            let table = read_long(text.as_bytes()).map_err(Failure::input)?;
            if table.names.len() != 1 {
                return Err(Failure::input(format!("ar1 needs one data column, found {}", table.names.len())));
            }
            let series: Vec<Series> = table.imputations.iter().map(|x| x.as_slice().to_vec()).collect();
            let done = CompletedDatasets::from_datasets(series).map_err(Failure::input)?;
            evaluate(&a, &Ar1Model, &done, &methods, &opts, None)?
        }
        ModelKind::Table => {
            let (layout, data) = read_counts(text.as_bytes()).map_err(Failure::input)?;
            let model = MultinomialModel::new(layout_dims(&layout), table_null(null, &layout)?).map_err(Failure::input)?;
            match data {
                CountData::Partial(partial) => {
                    let done = impute_multinomial_dirichlet(&partial, a.m, &mut RngStream::new(a.seed, 0))?;
                    let imputed = Imputed { imputer: done.provenance.imputer.clone(), seed: a.seed, m: a.m };
                    evaluate(&a, &model, &done, &methods, &opts, Some(imputed))?
                }
                CountData::Completed { observed, tables } => {
                    let mut done = CompletedDatasets::from_datasets(tables).map_err(Failure::input)?;
                    if let Some(o) = observed {
                        done = done.with_observed(o);
                    }
                    evaluate(&a, &model, &done, &methods, &opts, None)?
                }
            }
        }
    };
    match a.format {
        Format::Json => print_json(&report),
        Format::Human => emit(&human(&report)),
    }
}

fn layout_dims(layout: &CountLayout) -> [usize; 3] {
    [layout.levels[0].len(), layout.levels[1].len(), layout.levels[2].len()]
}

fn table_null(tag: Option<&str>, layout: &CountLayout) -> Result<TableNull, Failure> {
    match tag.unwrap_or("full-independence") {
        "full-independence" => Ok(TableNull::Mutual),
        "conditional-independence" => Ok(TableNull::Conditional { given: 0 }),
        other => {
            let axis = other
                .strip_prefix("conditional:")
                .ok_or_else(|| Failure::input(format!("unknown null {other:?} for table")))?;
            let given = match axis.parse::<usize>() {
                Ok(i) => i,
                Err(_) => layout
                    .axes
                    .iter()
                    .position(|n| n == axis)
                    .ok_or_else(|| Failure::input(format!("no axis named {axis:?}")))?,
            };
            Ok(TableNull::Conditional { given })
        }
    }
}

fn evaluate<M: LikelihoodModel>(
    a: &TestArgs,
    model: &M,
    done: &CompletedDatasets<M::Data>,
    methods: &[Method],
    opts: &TestOptions,
    imputed: Option<Imputed>,
) -> Result<Report, Failure> {
    let mut results = Vec::with_capacity(methods.len());
    for &method in methods {
        let result = run_test(method, model, done, opts)?;
        let uses_param = method.is_wald() || matches!(method, Method::L1 | Method::L2);
        let reject = result.p_value < a.alpha;
        results.push(Row { result, param: uses_param.then_some(opts.param), reject });
    }
    Ok(Report {
        command: "test",
        version: env!("CARGO_PKG_VERSION"),
        data: a.data.display().to_string(),
        model: model.tag(),
        null: model.null_tag(),
        m: done.m(),
        k: model.k(),
        h: model.h(),
        alpha: a.alpha,
        imputed,
        results,
    })
}

fn human(r: &Report) -> String {
    let mut s = format!("model {} ({}), m = {}, k = {}, h = {}\n", r.model, r.null, r.m, r.k, r.h);
    if let Some(i) = &r.imputed {
        s += &format!("imputed with {} (m = {}, seed = {})\n", i.imputer, i.m, i.seed);
    }
    s += &format!("{:<7}{:<7}{:>12}{:>12}{:>12}{:>10}  {:<11}{}\n", "method", "param", "D", "df2", "p-value", "r_hat", "null", format!("reject@{}", r.alpha));
    for row in &r.results {
        let t = &row.result;
        let mut flags = Vec::new();
        if t.diagnostics.negative_statistic {
            flags.push("negative D");
        }
        if t.diagnostics.negative_r {
            flags.push("negative r");
        }
        s += &format!(
            "{:<7}{:<7}{:>12.5}{:>12}{:>12.4e}{:>10}  {:<11}{}{}\n",
            t.method.label(),
            row.param.map_or("-", |p| p.label()),
            t.statistic,
            match t.df2 {
                Df2::Finite(v) => format!("{v:.2}"),
                Df2::Infinite => "inf".to_string(),
            },
            t.p_value,
            t.r_hat.map_or("-".to_string(), |e| format!("{:.4}", e.r_hat)),
            format!("{:?}", t.null_approx).to_lowercase(),
            if row.reject { "yes" } else { "no" },
            if flags.is_empty() { String::new() } else { format!("  [{}]", flags.join(", ")) },
        );
    }
    s
}

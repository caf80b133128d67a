//! `fri`: fit, evaluate, and inspect evidence-fusion classifiers on tabular data.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fri_core::baselines::{BpaDistance, FusionMethod};
use fri_core::dataset::{load_dataset, split, Dataset, LoadReport, Schema, SplitSpec};
use fri_core::pipeline::{self, results_csv, summary_csv, EvalOptions, TiePolicy};
use fri_core::replay;
use serde_json::json;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Data(_) => 4,
        }
    }
}

impl From<fri_core::Error> for CliError {
    fn from(e: fri_core::Error) -> Self {
        use fri_core::Error as E;
        match e {
            E::FileUnreadable { .. } => CliError::Io(e.to_string()),
            E::Schema(_) | E::InvalidFraction(_) | E::KOutOfRange { .. } | E::EmptySweep(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "fri", version, about = "Evidence-fusion classification with contribution-based source weights")]
struct Cli {
    /// Suppress progress and summary output on stderr.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute the worked examples and the published Iris sample; exit 1 on any mismatch.
    ReplayExamples {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Fit TFN models and source weights on the training split.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        split: SplitArgs,
        /// Write the model and weights JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score one or more methods on held-out splits.
    Eval {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        eval: EvalArgs,
        /// Print a stage-by-stage breakdown for this dataset row instead.
        #[arg(long, value_name = "ROW")]
        explain: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Accuracy for every dataset x method x seed, one row per run.
    Sweep {
        /// Dataset names or data files; repeat for several.
        #[arg(long = "dataset", required = true)]
        datasets: Vec<String>,
        /// Schema for each `--dataset` given as a file, in order.
        #[arg(long = "schema")]
        schemas: Vec<PathBuf>,
        #[arg(long, default_value = "data")]
        data_dir: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        eval: EvalArgs,
        /// Also write the per-(dataset, method) summary here.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Stage-by-stage breakdown of one sample's classification.
    Explain {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long)]
        row: usize,
        #[arg(long, value_parser = parse_distance, default_value = "jousselme")]
        deng_distance: BpaDistance,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct DataArgs {
    /// Dataset name (looked up as `<data-dir>/schemas/<name>.json`) or a data file path.
    #[arg(long)]
    dataset: String,
    /// Schema file; required when `--dataset` is a file.
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long, default_value = "data")]
    data_dir: PathBuf,
}

#[derive(Args)]
struct SplitArgs {
    /// Training fraction.
    #[arg(long, default_value_t = 0.7)]
    split: f64,
    #[arg(long, default_value_t = 0, conflicts_with = "seeds")]
    seed: u64,
    /// Seed list: `1..10` (both ends included), `1..=10`, or `1,4,9`.
    #[arg(long, value_parser = parse_seeds)]
    seeds: Option<Seeds>,
    #[arg(long, overrides_with = "no_stratified")]
    stratified: bool,
    #[arg(long = "no-stratified")]
    no_stratified: bool,
}

impl SplitArgs {
    fn spec(&self) -> SplitSpec {
        SplitSpec {
            train_fraction: self.split,
            seed: self.seed,
            stratified: !self.no_stratified,
        }
    }

    fn seeds(&self) -> Vec<u64> {
        self.seeds.as_ref().map_or_else(|| vec![self.seed], |s| s.0.clone())
    }
}

#[derive(Args)]
struct EvalArgs {
    /// fri, dst, murphy, deng, nmc, knn, or all; comma-separated for several.
    #[arg(long, default_value = "fri", value_parser = parse_methods)]
    method: Methods,
    #[arg(long, value_enum, default_value_t = TieArg::CountFlagged)]
    tie_policy: TieArg,
    #[arg(long, default_value_t = 5)]
    knn_k: usize,
    #[arg(long, value_parser = parse_distance, default_value = "jousselme")]
    deng_distance: BpaDistance,
}

impl EvalArgs {
    fn options(&self) -> EvalOptions {
        EvalOptions {
            tie_policy: match self.tie_policy {
                TieArg::CountFlagged => TiePolicy::CountFlagged,
                TieArg::Incorrect => TiePolicy::Incorrect,
            },
            knn_k: self.knn_k,
            deng_distance: self.deng_distance,
            keep_contributions: false,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    CountFlagged,
    Incorrect,
}

#[derive(Clone, Debug)]
struct Seeds(Vec<u64>);

#[derive(Clone, Debug)]
struct Methods(Vec<FusionMethod>);

fn parse_seeds(s: &str) -> Result<Seeds, String> {
    let bad = || format!("invalid seed list `{s}`");
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
    let seeds = if let Some((a, b)) = s.split_once("..=").or_else(|| s.split_once("..")) {
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    Ok(Seeds(seeds))
}

fn parse_methods(s: &str) -> Result<Methods, String> {
    if s == "all" {
        return Ok(Methods(FusionMethod::ALL.to_vec()));
    }
    s.split(',')
        .map(|m| m.trim().parse::<FusionMethod>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()
        .map(Methods)
}

fn parse_distance(s: &str) -> Result<BpaDistance, String> {
    s.parse::<BpaDistance>().map_err(|e| e.to_string())
}

/// Resolves a dataset argument to a loaded dataset.
fn load(dataset: &str, schema: Option<&Path>, data_dir: &Path, quiet: bool) -> CliResult<Dataset<f64>> {
    let as_file = Path::new(dataset);
    let (schema_path, data_path) = if as_file.is_file() {
        let schema = schema.ok_or_else(|| {
            CliError::Config(format!("--schema is required when --dataset is a file ({dataset})"))
        })?;
        (schema.to_owned(), Some(as_file.to_owned()))
    } else {
        let schema = schema
            .map(Path::to_owned)
            .unwrap_or_else(|| data_dir.join("schemas").join(format!("{dataset}.json")));
        (schema, None)
    };
    let parsed = Schema::from_path(&schema_path)
        .map_err(|e| CliError::Config(format!("schema {}: {e}", schema_path.display())))?;
    let data_path = match data_path.or_else(|| parsed.data_path(&schema_path)) {
        Some(p) => p,
        None => {
            return Err(CliError::Config(format!(
                "schema {} names no data file; pass --dataset <file>",
                schema_path.display()
            )))
        }
    };
    let (d, report): (Dataset<f64>, LoadReport) = load_dataset(&data_path, &parsed)?;
    if !quiet && !report.dropped.is_empty() {
        eprintln!("{}: dropped {} of {} rows", d.name, report.dropped.len(), report.rows_parsed);
        for row in &report.dropped {
            eprintln!("  line {}: {}", row.line, row.reason);
        }
    }
    Ok(d)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn replay_examples(format: Format) -> CliResult<()> {
    let report = replay::replay_all()?;
    match format {
        Format::Json => print!("{}", to_json(&report)),
        Format::Csv => {
            for c in &report.checks {
                println!("{c}");
            }
            let failed = report.failures().count();
            println!("{} checks, {} failed", report.checks.len(), failed);
        }
    }
    if report.all_pass() {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!("{} replay values out of tolerance", report.failures().count())))
    }
}

fn train(data: &DataArgs, split_args: &SplitArgs, out: Option<&Path>, quiet: bool) -> CliResult<()> {
    let d = load(&data.dataset, data.schema.as_deref(), &data.data_dir, quiet)?;
    let (train, _) = split(&d, &split_args.spec())?;
    let (model, report) = pipeline::train_reliability(&train, false)?;
    let doc = json!({
        "dataset": d.name,
        "split": split_args.spec(),
        "model": model.to_json(),
        "reliability": report,
    });
    emit(out, &to_json(&doc))?;
    if !quiet && out.is_some() {
        println!("{}", report.table());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_sweep(
    datasets: &[Dataset<f64>],
    split_args: &SplitArgs,
    eval: &EvalArgs,
    out: Option<&Path>,
    summary: Option<&Path>,
    format: Format,
    quiet: bool,
) -> CliResult<()> {
    let seeds = split_args.seeds();
    let report = pipeline::sweep(datasets, &eval.method.0, &seeds, &split_args.spec(), &eval.options())?;
    for cell in report.cells.iter().filter(|c| c.error.is_some()) {
        eprintln!(
            "{} {} seed {}: {}",
            cell.dataset,
            cell.method,
            cell.seed,
            cell.error.as_deref().unwrap_or_default()
        );
    }
    let text = match format {
        Format::Csv => results_csv(report.results()),
        Format::Json if report.cells.len() == 1 => match &report.cells[0].result {
            Some(r) => to_json(r),
            None => to_json(&report.cells[0]),
        },
        Format::Json => to_json(&report),
    };
    emit(out, &text)?;
    if let Some(path) = summary {
        emit(Some(path), &summary_csv(&report.summary))?;
    } else if !quiet && report.cells.len() > 1 {
        eprint!("{}", summary_csv(&report.summary));
    }
    if report.results().next().is_none() {
        return Err(CliError::Data("every run failed".into()));
    }
    Ok(())
}

fn explain(d: &Dataset<f64>, spec: &SplitSpec, row: usize, opts: &EvalOptions) -> CliResult<()> {
    let e = pipeline::explain(d, spec, row, opts)?;
    print!("{}", e.render());
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    let quiet = cli.quiet;
    match cli.command {
        Command::ReplayExamples { format } => replay_examples(format),
        Command::Train { data, split, out } => train(&data, &split, out.as_deref(), quiet),
        Command::Eval {
            data,
            split,
            eval,
            explain: row,
            out,
            format,
        } => {
            let d = load(&data.dataset, data.schema.as_deref(), &data.data_dir, quiet)?;
            match row {
                Some(row) => explain(&d, &split.spec(), row, &eval.options()),
                None => run_sweep(&[d], &split, &eval, out.as_deref(), None, format, quiet),
            }
        }
        Command::Sweep {
            datasets,
            schemas,
            data_dir,
            split,
            eval,
            summary,
            out,
            format,
        } => {
            let mut schemas = schemas.into_iter();
            let loaded = datasets
                .iter()
                .map(|name| {
                    let schema = if Path::new(name).is_file() { schemas.next() } else { None };
                    load(name, schema.as_deref(), &data_dir, quiet)
                })
                .collect::<CliResult<Vec<_>>>()?;
            run_sweep(&loaded, &split, &eval, out.as_deref(), summary.as_deref(), format, quiet)
        }
        Command::Explain {
            data,
            split,
            row,
            deng_distance,
        } => {
            let d = load(&data.dataset, data.schema.as_deref(), &data.data_dir, quiet)?;
            let opts = EvalOptions {
                deng_distance,
                ..EvalOptions::default()
            };
            explain(&d, &split.spec(), row, &opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

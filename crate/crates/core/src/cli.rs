//! `narme-bench` command-line front end.
//!
//! Exit codes: 0 success (a diverged run is a recorded outcome), 1 I/O or
//! input-data failure, 2 usage or validation error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::loss::{LossKind, LossSpec, Reduction};
use crate::nn::OptimizerKind;
use crate::report::{self, ComparisonRow, ComparisonTable, SweepRow};
use crate::train::{
    self, BatchMode, Comparison, CsvSource, Experiment, ExperimentDef, Metric, RunResult,
    Threshold, TrainConfig,
};

pub const OUT_DIR_ENV: &str = "NARME_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "narme-bench", version, about = "Convergence benchmarks for root-based regression losses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one configuration and write its curve and result.
    Run(RunArgs),
    /// Epochs-to-threshold across root orders and seeds.
    Sweep(SweepArgs),
    /// Train every requested loss under identical settings and tabulate.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentArg {
    NacAdd,
    NaluMul,
    Stock,
}

impl From<ExperimentArg> for Experiment {
    fn from(e: ExperimentArg) -> Self {
        match e {
            ExperimentArg::NacAdd => Experiment::NacAdd,
            ExperimentArg::NaluMul => Experiment::NaluMul,
            ExperimentArg::Stock => Experiment::Stock,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LossArg {
    Mse,
    Mae,
    Huber,
    LogCosh,
    SrNarme,
    DrNarme,
}

impl From<LossArg> for LossKind {
    fn from(l: LossArg) -> Self {
        match l {
            LossArg::Mse => LossKind::Mse,
            LossArg::Mae => LossKind::Mae,
            LossArg::Huber => LossKind::Huber,
            LossArg::LogCosh => LossKind::LogCosh,
            LossArg::SrNarme => LossKind::SrNarme,
            LossArg::DrNarme => LossKind::DrNarme,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum, default_value = "nac-add")]
    pub experiment: ExperimentArg,
    /// First root order (default: the experiment's).
    #[arg(long)]
    pub n_t: Option<u32>,
    /// Second root order (default: the experiment's).
    #[arg(long)]
    pub m_t: Option<u32>,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub clamp_eps: f64,
    #[arg(long, value_parser = ["mean", "sum"], default_value = "mean")]
    pub reduction: String,
    /// Learning rate (default: the experiment's).
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long, value_parser = ["adam", "sgd"], default_value = "adam")]
    pub optimizer: String,
    /// Epoch cap (default: the experiment's per-loss budget).
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Mini-batch size; 0 selects full-batch (default: the experiment's).
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// `METRIC:CMP:VALUE` (e.g. `test-mae:le:0.01`) or `none`.
    #[arg(long)]
    pub threshold: Option<String>,
    /// Keep training after the threshold is met.
    #[arg(long)]
    pub no_stop: bool,
    /// CSV series for the stock experiment.
    #[arg(long, requires = "column")]
    pub csv: Option<PathBuf>,
    #[arg(long, requires = "csv")]
    pub column: Option<String>,
    #[arg(long, env = OUT_DIR_ENV, default_value = "results")]
    pub out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "csv,json,table")]
    pub emit: Vec<Emit>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub loss: LossArg,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "sr-narme")]
    pub loss: LossArg,
    #[arg(long, value_delimiter = ',', required = true)]
    pub orders: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub seeds: Vec<u64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// `all` or a comma-separated list of loss kinds.
    #[arg(long, default_value = "all")]
    pub losses: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. }
            | Error::Csv { .. }
            | Error::ColumnNotFound { .. }
            | Error::ParseCell { .. }
            | Error::SeriesTooShort { .. } => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Compare(a) => cmd_compare(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\nRun `narme-bench --help` for usage.");
            2
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn parse_threshold(spec: &str) -> Result<Option<Threshold>, CliError> {
    if spec == "none" {
        return Ok(None);
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let [metric, cmp, value] = parts[..] else {
        return Err(usage(format!("threshold '{spec}' is not METRIC:CMP:VALUE")));
    };
    let metric: Metric = metric.parse()?;
    let comparison = match cmp {
        "le" => Comparison::Le,
        "lt" => Comparison::Lt,
        "ge" => Comparison::Ge,
        "gt" => Comparison::Gt,
        _ => return Err(usage(format!("unknown comparison '{cmp}' (le, lt, ge, gt)"))),
    };
    let value: f64 = value
        .parse()
        .ok()
        .filter(|v: &f64| v.is_finite())
        .ok_or_else(|| usage(format!("threshold value '{value}' is not a finite number")))?;
    Ok(Some(Threshold {
        metric,
        comparison,
        value,
    }))
}

impl CommonArgs {
    fn def(&self) -> ExperimentDef {
        ExperimentDef::new(self.experiment.into())
    }

    fn loss(&self, kind: LossKind) -> LossSpec<f64> {
        let base = Experiment::from(self.experiment).default_loss(kind);
        LossSpec {
            n_t: self.n_t.unwrap_or(base.n_t),
            m_t: self.m_t.unwrap_or(base.m_t),
            delta: self.delta,
            clamp_eps: self.clamp_eps,
            reduction: if self.reduction == "sum" {
                Reduction::Sum
            } else {
                Reduction::Mean
            },
            ..base
        }
    }

    /// Validates every numeric flag and builds the run configuration.
    fn config(&self, def: &ExperimentDef, kind: LossKind, seed: u64) -> Result<TrainConfig, CliError> {
        let mut cfg = def.config(self.loss(kind), seed);
        if let Some(epochs) = self.epochs {
            cfg.epoch_cap = epochs;
        }
        if let Some(lr) = self.lr {
            cfg.lr = lr;
        }
        cfg.optimizer = if self.optimizer == "sgd" {
            OptimizerKind::Sgd
        } else {
            OptimizerKind::Adam
        };
        match self.batch_size {
            Some(0) => cfg.batch = BatchMode::Full,
            Some(size) => cfg.batch = BatchMode::Mini { size },
            None => {}
        }
        if let Some(t) = &self.threshold {
            cfg.threshold = parse_threshold(t)?;
        }
        cfg.stop_at_threshold = !self.no_stop;
        if let (Some(path), Some(column)) = (&self.csv, &self.column) {
            cfg.series_csv = Some(CsvSource {
                path: path.clone(),
                column: column.clone(),
            });
        }
        cfg.validate(def)?;
        Ok(cfg)
    }

    fn emits(&self, e: Emit) -> bool {
        self.emit.contains(&e)
    }

    fn out_dir(&self) -> Result<&Path, CliError> {
        std::fs::create_dir_all(&self.out)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", self.out.display())))?;
        Ok(&self.out)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn write_run_files(common: &CommonArgs, dir: &Path, result: &RunResult) -> Result<(), CliError> {
    if common.emits(Emit::Csv) {
        let path = dir.join(format!("curve_{}.csv", result.config_hash));
        write_file(&path, &report::curve_csv(result))?;
    }
    if common.emits(Emit::Json) {
        let mut json = serde_json::to_string_pretty(result).expect("run result serializes");
        json.push('\n');
        write_file(&dir.join(format!("result_{}.json", result.config_hash)), &json)?;
    }
    Ok(())
}

fn print(text: &str) {
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(text.as_bytes());
}

fn warn(result: &RunResult) {
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
}

fn with_correct_count(e: ExperimentArg) -> bool {
    e != ExperimentArg::Stock
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let def = args.common.def();
    let cfg = args.common.config(&def, args.loss.into(), args.seed)?;
    let dir = args.common.out_dir()?;
    let result = train::train(&def, &cfg)?;
    warn(&result);
    write_run_files(&args.common, dir, &result)?;
    if args.common.emits(Emit::Table) {
        let row = ComparisonRow::from_result(&result, with_correct_count(args.common.experiment));
        print(&ComparisonTable::new(vec![row]).to_text());
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let kind = LossKind::from(args.loss);
    if !kind.is_narme() {
        return Err(usage("sweep needs --loss sr-narme or dr-narme"));
    }
    if args.orders.len() < 2 {
        return Err(usage("sweep needs at least two --orders"));
    }
    if args.seeds.is_empty() {
        return Err(usage("sweep needs at least one seed"));
    }
    let def = args.common.def();
    let mut rows = Vec::with_capacity(args.orders.len() * args.seeds.len());
    let bases = args
        .seeds
        .iter()
        .map(|&seed| {
            let cfg = args.common.config(&def, kind, seed)?;
            // Validate every order before any training.
            for &n_t in &args.orders {
                LossSpec { n_t, ..cfg.loss }.validate()?;
            }
            Ok(cfg)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let dir = args.common.out_dir()?;
    for base in &bases {
        for (n_t, ept) in train::order_sweep(&def, base, &args.orders)? {
            rows.push(SweepRow {
                n_t,
                seed: base.seed,
                epochs_to_threshold: ept,
            });
        }
    }
    if args.common.emits(Emit::Csv) {
        write_file(&dir.join("sweep.csv"), &report::sweep_csv(&rows))?;
    }
    if args.common.emits(Emit::Table) {
        print(&report::sweep_csv(&rows));
    }
    Ok(())
}

fn parse_losses(spec: &str) -> Result<Vec<LossKind>, CliError> {
    if spec == "all" {
        return Ok(LossKind::TABLE_ORDER.to_vec());
    }
    let kinds = spec
        .split(',')
        .map(|s| s.trim().parse::<LossKind>())
        .collect::<Result<Vec<_>, _>>()?;
    if kinds.is_empty() {
        return Err(usage("no losses requested"));
    }
    Ok(kinds)
}

fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let def = args.common.def();
    let cfgs = parse_losses(&args.losses)?
        .into_iter()
        .map(|kind| args.common.config(&def, kind, args.seed))
        .collect::<Result<Vec<_>, _>>()?;
    let dir = args.common.out_dir()?;
    let mut rows = Vec::with_capacity(cfgs.len());
    for result in train::train_many(&def, &cfgs) {
        let result = result?;
        warn(&result);
        write_run_files(&args.common, dir, &result)?;
        rows.push(ComparisonRow::from_result(
            &result,
            with_correct_count(args.common.experiment),
        ));
    }
    let table = ComparisonTable::new(rows);
    let stem = format!("compare_{}", Experiment::from(args.common.experiment).name());
    if args.common.emits(Emit::Csv) {
        write_file(&dir.join(format!("{stem}.csv")), &table.to_csv())?;
    }
    if args.common.emits(Emit::Table) {
        let text = table.to_text();
        write_file(&dir.join(format!("{stem}.txt")), &text)?;
        print(&text);
    }
    Ok(())
}

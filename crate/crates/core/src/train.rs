//! Seeded training runs, epochs-to-threshold measurement and the three
//! canonical experiments (NAC addition, NALU multiplication, price series).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{
    self, gen_arithmetic_with, ArithmeticOp, LabeledDataset, MinMaxScaler, Normalize, RangeSpec,
    DEFAULT_SPLIT_FRACTION,
};
use crate::error::{Error, Result};
use crate::loss::{self, LossKind, LossSpec, PredictionBatch};
use crate::matrix::Matrix;
use crate::metrics;
use crate::nn::{
    Activation, DenseLayer, Layer, NacCell, NaluCell, Network, OptimizerConfig, OptimizerKind,
    OptimizerState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    NacAdd,
    NaluMul,
    Stock,
}

impl Experiment {
    pub const ALL: [Experiment; 3] = [Experiment::NacAdd, Experiment::NaluMul, Experiment::Stock];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::NacAdd => "nac-add",
            Experiment::NaluMul => "nalu-mul",
            Experiment::Stock => "stock",
        }
    }

    /// Root orders used when this experiment is run with a NARME loss.
    pub fn default_loss(self, kind: LossKind) -> LossSpec<f64> {
        match (self, kind) {
            (Experiment::NacAdd, LossKind::SrNarme) => LossSpec::sr_narme(10),
            (Experiment::NacAdd, LossKind::DrNarme) => LossSpec::dr_narme(10, 3),
            (Experiment::NaluMul, LossKind::SrNarme) => LossSpec::sr_narme(8),
            (Experiment::NaluMul, LossKind::DrNarme) => LossSpec::dr_narme(8, 3),
            (Experiment::Stock, LossKind::SrNarme) => LossSpec::sr_narme(10),
            (Experiment::Stock, LossKind::DrNarme) => LossSpec::dr_narme(10, 3),
            (_, kind) => LossSpec::new(kind),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum Architecture {
    /// One NAC cell.
    Nac { inputs: usize, outputs: usize },
    /// One NALU cell.
    Nalu { inputs: usize, outputs: usize },
    /// ReLU hidden layers, identity output. `widths` includes input and output.
    Mlp { widths: Vec<usize> },
}

impl Architecture {
    pub fn inputs(&self) -> usize {
        match self {
            Architecture::Nac { inputs, .. } | Architecture::Nalu { inputs, .. } => *inputs,
            Architecture::Mlp { widths } => widths[0],
        }
    }

    pub fn build<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Result<Network<f64>> {
        let layers: Vec<Layer<f64>> = match self {
            Architecture::Nac { inputs, outputs } => vec![NacCell::init(rng, *inputs, *outputs).into()],
            Architecture::Nalu { inputs, outputs } => {
                vec![NaluCell::init(rng, *inputs, *outputs).into()]
            }
            Architecture::Mlp { widths } => {
                if widths.len() < 2 {
                    return Err(Error::InvalidParameter("mlp needs at least two widths".into()));
                }
                let last = widths.len() - 2;
                widths
                    .windows(2)
                    .enumerate()
                    .map(|(i, w)| {
                        let act = if i == last {
                            Activation::Identity
                        } else {
                            Activation::Relu
                        };
                        DenseLayer::xavier(rng, w[0], w[1], act).into()
                    })
                    .collect()
            }
        };
        Network::new(layers)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum SeriesSource {
    Synthetic {
        /// Series seed; the run seed when absent.
        seed: Option<u64>,
        length: usize,
        drift: f64,
        vol: f64,
        start: f64,
    },
    Csv {
        path: PathBuf,
        column: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum DataRecipe {
    Arithmetic {
        op: ArithmeticOp,
        train_range: RangeSpec,
        test_range: RangeSpec,
        train_count: usize,
        /// Extrapolation set for error metrics and the curve.
        test_count: usize,
        /// Separate small set for `correct_count`; the test set is used when absent.
        correct_set_count: Option<usize>,
    },
    Series {
        source: SeriesSource,
        window: usize,
        normalize: Normalize,
        split_fraction: f64,
    },
}

/// Per-experiment epoch budgets: root losses and baselines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochBudgets {
    pub narme: usize,
    pub baseline: usize,
}

impl EpochBudgets {
    pub fn for_loss(&self, kind: LossKind) -> usize {
        if kind.is_narme() {
            self.narme
        } else {
            self.baseline
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDef {
    pub experiment: Experiment,
    pub architecture: Architecture,
    pub data: DataRecipe,
    pub budgets: EpochBudgets,
    pub lr: f64,
    pub batch: BatchMode,
    pub threshold: Option<Threshold>,
}

pub const STOCK_WINDOW: usize = 30;

impl ExperimentDef {
    pub fn new(experiment: Experiment) -> Self {
        let two_decimals = Some(Threshold {
            metric: Metric::TestMae,
            comparison: Comparison::Le,
            value: 0.01,
        });
        match experiment {
            Experiment::NacAdd => Self {
                experiment,
                architecture: Architecture::Nac {
                    inputs: 2,
                    outputs: 1,
                },
                data: DataRecipe::Arithmetic {
                    op: ArithmeticOp::Add,
                    train_range: RangeSpec { low: 0.0, high: 10.0 },
                    test_range: RangeSpec { low: 10.0, high: 20.0 },
                    train_count: 256,
                    test_count: 100,
                    correct_set_count: None,
                },
                budgets: EpochBudgets {
                    narme: 2_500,
                    baseline: 25_000,
                },
                lr: 0.01,
                batch: BatchMode::Full,
                threshold: two_decimals,
            },
            Experiment::NaluMul => Self {
                experiment,
                architecture: Architecture::Nalu {
                    inputs: 2,
                    outputs: 1,
                },
                data: DataRecipe::Arithmetic {
                    op: ArithmeticOp::Mul,
                    train_range: RangeSpec { low: 0.0, high: 5.0 },
                    test_range: RangeSpec { low: 5.0, high: 10.0 },
                    train_count: 256,
                    test_count: 100,
                    correct_set_count: Some(10),
                },
                budgets: EpochBudgets {
                    narme: 1_470,
                    baseline: 30_000,
                },
                lr: 0.01,
                batch: BatchMode::Full,
                threshold: two_decimals,
            },
            Experiment::Stock => Self {
                experiment,
                architecture: Architecture::Mlp {
                    widths: vec![STOCK_WINDOW, 64, 32, 1],
                },
                data: DataRecipe::Series {
                    source: SeriesSource::Synthetic {
                        seed: None,
                        length: 1_000,
                        drift: 0.0002,
                        vol: 0.01,
                        start: 100.0,
                    },
                    window: STOCK_WINDOW,
                    normalize: Normalize::MinmaxTrain,
                    split_fraction: DEFAULT_SPLIT_FRACTION,
                },
                budgets: EpochBudgets {
                    narme: 10,
                    baseline: 10,
                },
                lr: 1e-3,
                // Ten full-batch epochs would be ten updates.
                batch: BatchMode::Mini { size: 32 },
                threshold: None,
            },
        }
    }

    /// Default run configuration for `loss` on this experiment.
    pub fn config(&self, loss: LossSpec<f64>, seed: u64) -> TrainConfig {
        TrainConfig {
            experiment: self.experiment,
            loss,
            epoch_cap: self.budgets.for_loss(loss.kind),
            lr: self.lr,
            optimizer: OptimizerKind::Adam,
            seed,
            batch: self.batch,
            threshold: self.threshold,
            stop_at_threshold: true,
            series_csv: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum BatchMode {
    #[default]
    Full,
    Mini {
        size: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    TestMae,
    OverallVariance,
    DecimalAccuracy,
    CorrectCount,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "test-mae" | "test_mae" => Ok(Metric::TestMae),
            "overall-variance" | "overall_variance" => Ok(Metric::OverallVariance),
            "decimal-accuracy" | "decimal_accuracy" => Ok(Metric::DecimalAccuracy),
            "correct-count" | "correct_count" => Ok(Metric::CorrectCount),
            _ => Err(Error::InvalidParameter(format!("unknown metric '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    Le,
    Lt,
    Ge,
    Gt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub metric: Metric,
    pub comparison: Comparison,
    pub value: f64,
}

impl Threshold {
    pub fn holds(&self, report: &MetricReport) -> bool {
        let v = report.get(self.metric);
        match self.comparison {
            Comparison::Le => v <= self.value,
            Comparison::Lt => v < self.value,
            Comparison::Ge => v >= self.value,
            Comparison::Gt => v > self.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvSource {
    pub path: PathBuf,
    pub column: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub experiment: Experiment,
    pub loss: LossSpec<f64>,
    pub epoch_cap: usize,
    pub lr: f64,
    pub optimizer: OptimizerKind,
    pub seed: u64,
    pub batch: BatchMode,
    pub threshold: Option<Threshold>,
    pub stop_at_threshold: bool,
    /// Replaces the synthetic series of the stock experiment.
    pub series_csv: Option<CsvSource>,
}

impl TrainConfig {
    pub fn validate(&self, def: &ExperimentDef) -> Result<()> {
        if self.experiment != def.experiment {
            return Err(Error::InvalidParameter(format!(
                "config is for {} but the definition is {}",
                self.experiment, def.experiment
            )));
        }
        self.loss.validate()?;
        self.optimizer_config().validate()?;
        if let BatchMode::Mini { size: 0 } = self.batch {
            return Err(Error::InvalidParameter("mini-batch size must be positive".into()));
        }
        if let Some(t) = self.threshold {
            if t.value.is_nan() {
                return Err(Error::InvalidParameter("threshold value is NaN".into()));
            }
        }
        if self.series_csv.is_some() && self.experiment != Experiment::Stock {
            return Err(Error::InvalidParameter(
                "a CSV series only applies to the stock experiment".into(),
            ));
        }
        Ok(())
    }

    pub fn optimizer_config(&self) -> OptimizerConfig<f64> {
        match self.optimizer {
            OptimizerKind::Sgd => OptimizerConfig::sgd(self.lr),
            OptimizerKind::Adam => OptimizerConfig::adam(self.lr),
        }
    }

    /// Stable hex digest of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        hex::encode(&digest[..8])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub overall_variance: f64,
    pub decimal_accuracy: u32,
    pub correct_count: usize,
    /// Size of the set `correct_count` is measured on.
    pub correct_total: usize,
    pub test_mae: f64,
}

impl MetricReport {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::TestMae => self.test_mae,
            Metric::OverallVariance => self.overall_variance,
            Metric::DecimalAccuracy => f64::from(self.decimal_accuracy),
            Metric::CorrectCount => self.correct_count as f64,
        }
    }

    fn is_finite(&self) -> bool {
        self.overall_variance.is_finite() && self.test_mae.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub test_overall_variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    /// Ran to the epoch cap.
    Completed,
    /// Stopped early because the threshold held.
    ReachedThreshold,
    /// Loss, parameters or test predictions became non-finite.
    Diverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: TrainConfig,
    pub config_hash: String,
    pub status: RunStatus,
    /// Epoch whose update produced non-finite values.
    pub diverged_at: Option<usize>,
    pub epochs_run: usize,
    pub epochs_to_threshold: Option<usize>,
    pub curve: Vec<EpochRecord>,
    /// Metrics of the last finite parameters.
    pub final_metrics: MetricReport,
    pub warnings: Vec<String>,
}

/// Data of one run, in the units the network sees.
#[derive(Debug, Clone)]
pub struct ExperimentData {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
    pub correct_set: Option<LabeledDataset>,
    /// Maps predictions back to series units before metrics.
    pub scaler: Option<MinMaxScaler>,
}

impl ExperimentData {
    pub fn metrics(&self, net: &Network<f64>) -> Result<MetricReport> {
        let unscale = |m: Matrix<f64>| match self.scaler {
            Some(s) => m.map(|v| s.inverse(v)),
            None => m,
        };
        let pred = unscale(net.predict(&self.test.inputs)?);
        let target = unscale(self.test.targets.clone());
        let (p, t) = (pred.as_slice(), target.as_slice());
        let (correct_count, correct_total) = match &self.correct_set {
            Some(set) => {
                let cp = unscale(net.predict(&set.inputs)?);
                let ct = unscale(set.targets.clone());
                let n = metrics::correct_count(cp.as_slice(), ct.as_slice(), metrics::DEFAULT_REL_TOL)?;
                (n, set.len())
            }
            None => (metrics::correct_count(p, t, metrics::DEFAULT_REL_TOL)?, t.len()),
        };
        Ok(MetricReport {
            overall_variance: metrics::overall_variance(p, t)?,
            decimal_accuracy: metrics::decimal_accuracy(p, t, metrics::DEFAULT_DECIMALS)?,
            correct_count,
            correct_total,
            test_mae: metrics::mean_abs_error(p, t)?,
        })
    }
}

/// Builds the seeded data and initial network of a run.
///
/// Both come from one generator seeded with `cfg.seed`: data first, then
/// parameters. Returns the generator for any further (mini-batch) draws.
pub fn prepare(
    def: &ExperimentDef,
    cfg: &TrainConfig,
) -> Result<(ExperimentData, Network<f64>, ChaCha8Rng)> {
    cfg.validate(def)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let data = match &def.data {
        DataRecipe::Arithmetic {
            op,
            train_range,
            test_range,
            train_count,
            test_count,
            correct_set_count,
        } => {
            if train_range.overlaps(test_range) {
                return Err(Error::OverlappingRanges(
                    train_range.low,
                    train_range.high,
                    test_range.low,
                    test_range.high,
                ));
            }
            let train = gen_arithmetic_with(&mut rng, cfg.seed, *train_count, *op, *train_range)?;
            let test = gen_arithmetic_with(&mut rng, cfg.seed, *test_count, *op, *test_range)?;
            let correct_set = correct_set_count
                .map(|n| gen_arithmetic_with(&mut rng, cfg.seed, n, *op, *test_range))
                .transpose()?;
            ExperimentData {
                train,
                test,
                correct_set,
                scaler: None,
            }
        }
        DataRecipe::Series {
            source,
            window,
            normalize,
            split_fraction,
        } => {
            let series = match (&cfg.series_csv, source) {
                (Some(csv), _) => data::load_csv_series(&csv.path, &csv.column)?,
                (None, SeriesSource::Csv { path, column }) => data::load_csv_series(path, column)?,
                (
                    None,
                    SeriesSource::Synthetic {
                        seed,
                        length,
                        drift,
                        vol,
                        start,
                    },
                ) => data::gen_synthetic_series(
                    seed.unwrap_or(cfg.seed),
                    *length,
                    *drift,
                    *vol,
                    *start,
                )?,
            };
            let split = data::window_series(&series, *window, *normalize, *split_fraction)?;
            ExperimentData {
                train: split.train,
                test: split.test,
                correct_set: None,
                scaler: split.scaler,
            }
        }
    };
    if def.architecture.inputs() != data.train.inputs.cols() {
        return Err(Error::ShapeMismatch(format!(
            "architecture takes {} inputs but the data has {}",
            def.architecture.inputs(),
            data.train.inputs.cols()
        )));
    }
    let net = def.architecture.build(&mut rng)?;
    Ok((data, net, rng))
}

/// Warning for root losses used outside their recommended target range:
/// single-root suits targets in `[1, ∞)`, double-root handles `[0, 1)`.
pub fn applicability_warning(kind: LossKind, targets: &[f64]) -> Option<String> {
    if kind != LossKind::SrNarme {
        return None;
    }
    let inside = targets.iter().filter(|&&t| t > 0.0 && t < 1.0).count();
    (inside > 0).then(|| {
        format!(
            "sr-narme selected but {inside} of {} training targets lie in (0, 1); dr-narme is the recommended root loss there",
            targets.len()
        )
    })
}

fn train_loss(spec: &LossSpec<f64>, pred: &Matrix<f64>, target: &Matrix<f64>) -> Option<f64> {
    if !pred.is_finite() {
        return None;
    }
    let batch = PredictionBatch::new(pred, target).ok()?;
    loss::loss_value(spec, &batch).ok().filter(|v| v.is_finite())
}

pub fn train(def: &ExperimentDef, cfg: &TrainConfig) -> Result<RunResult> {
    train_with_observer(def, cfg, |_, _| {})
}

/// Like [`train`], calling `observer(epoch, net)` at initialization (epoch 0)
/// and after every recorded epoch.
pub fn train_with_observer(
    def: &ExperimentDef,
    cfg: &TrainConfig,
    mut observer: impl FnMut(usize, &Network<f64>),
) -> Result<RunResult> {
    let (data, mut net, mut rng) = prepare(def, cfg)?;
    let mut opt = OptimizerState::new(cfg.optimizer_config(), net.param_count())?;
    let spec = cfg.loss;
    let warnings: Vec<String> =
        applicability_warning(spec.kind, data.train.targets.as_slice()).into_iter().collect();

    let mut result = RunResult {
        config: cfg.clone(),
        config_hash: cfg.hash(),
        status: RunStatus::Completed,
        diverged_at: None,
        epochs_run: 0,
        epochs_to_threshold: None,
        curve: Vec::with_capacity(cfg.epoch_cap),
        final_metrics: data.metrics(&net)?,
        warnings,
    };
    observer(0, &net);
    if !result.final_metrics.is_finite() {
        result.status = RunStatus::Diverged;
        result.diverged_at = Some(0);
        return Ok(result);
    }
    if let Some(t) = cfg.threshold {
        if t.holds(&result.final_metrics) {
            result.epochs_to_threshold = Some(0);
            if cfg.stop_at_threshold {
                result.status = RunStatus::ReachedThreshold;
                return Ok(result);
            }
        }
    }

    let train_x = &data.train.inputs;
    let train_y = &data.train.targets;
    let n = data.train.len();
    let mut indices: Vec<usize> = (0..n).collect();
    // Full-batch runs reuse the forward pass that measured the previous epoch.
    let mut pred = net.forward(train_x)?;

    for epoch in 1..=cfg.epoch_cap {
        let last_good = net.params();
        let diverged = match cfg.batch {
            BatchMode::Full => {
                step(&mut net, &mut opt, &spec, &pred, train_y)?;
                pred = net.forward(train_x)?;
                train_loss(&spec, &pred, train_y)
            }
            BatchMode::Mini { size } => {
                indices.shuffle(&mut rng);
                let mut ok = true;
                for chunk in indices.chunks(size) {
                    let x = train_x.select_rows(chunk);
                    let y = train_y.select_rows(chunk);
                    let p = net.forward(&x)?;
                    if train_loss(&spec, &p, &y).is_none() {
                        ok = false;
                        break;
                    }
                    step(&mut net, &mut opt, &spec, &p, &y)?;
                }
                if ok {
                    train_loss(&spec, &net.predict(train_x)?, train_y)
                } else {
                    None
                }
            }
        }
        .filter(|_| net.params().iter().all(|v| v.is_finite()))
        .and_then(|loss| {
            let report = data.metrics(&net).ok()?;
            report.is_finite().then_some((loss, report))
        });

        let Some((loss, report)) = diverged else {
            net.set_params(&last_good)?;
            result.status = RunStatus::Diverged;
            result.diverged_at = Some(epoch);
            break;
        };
        result.curve.push(EpochRecord {
            epoch,
            train_loss: loss,
            test_overall_variance: report.overall_variance,
        });
        result.epochs_run = epoch;
        result.final_metrics = report;
        observer(epoch, &net);
        if result.epochs_to_threshold.is_none() {
            if let Some(t) = cfg.threshold {
                if t.holds(&report) {
                    result.epochs_to_threshold = Some(epoch);
                    if cfg.stop_at_threshold {
                        result.status = RunStatus::ReachedThreshold;
                        break;
                    }
                }
            }
        }
    }
    Ok(result)
}

/// One optimizer update from an already computed forward pass.
fn step(
    net: &mut Network<f64>,
    opt: &mut OptimizerState<f64>,
    spec: &LossSpec<f64>,
    pred: &Matrix<f64>,
    target: &Matrix<f64>,
) -> Result<()> {
    if !pred.is_finite() {
        // Leave the parameters; the caller detects the non-finite loss.
        return Ok(());
    }
    let grad = loss::loss_grad(spec, &PredictionBatch::new(pred, target)?)?;
    let grads = net.backward(&grad)?;
    opt.step(net, &grads.params)
}

/// Independent runs, executed in parallel; results keep the input order.
pub fn train_many(def: &ExperimentDef, cfgs: &[TrainConfig]) -> Vec<Result<RunResult>> {
    cfgs.par_iter().map(|cfg| train(def, cfg)).collect()
}

/// One run per root order with everything else fixed.
///
/// Each entry pairs the order with its epochs-to-threshold (absent when the
/// threshold was never met). Duplicate orders produce duplicate entries.
pub fn order_sweep(
    def: &ExperimentDef,
    base: &TrainConfig,
    orders: &[u32],
) -> Result<Vec<(u32, Option<usize>)>> {
    if !base.loss.kind.is_narme() {
        return Err(Error::InvalidParameter(format!(
            "order sweeps need a root loss, got {}",
            base.loss.kind
        )));
    }
    if orders.is_empty() {
        return Err(Error::InvalidParameter("no orders to sweep".into()));
    }
    let cfgs: Vec<TrainConfig> = orders
        .iter()
        .map(|&n_t| TrainConfig {
            loss: LossSpec { n_t, ..base.loss },
            ..base.clone()
        })
        .collect();
    train_many(def, &cfgs)
        .into_iter()
        .zip(orders)
        .map(|(r, &n_t)| r.map(|r| (n_t, r.epochs_to_threshold)))
        .collect()
}

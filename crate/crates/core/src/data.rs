//! Seeded dataset construction: arithmetic pairs with extrapolation splits,
//! synthetic price-like series, CSV ingestion and sliding windows.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Half-open interval `[low, high)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeSpec {
    pub low: f64,
    pub high: f64,
}

impl RangeSpec {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        let r = Self { low, high };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.low.is_finite() && self.high.is_finite() && self.low < self.high) {
            return Err(Error::InvalidRange {
                low: self.low,
                high: self.high,
            });
        }
        Ok(())
    }

    pub fn overlaps(&self, other: &RangeSpec) -> bool {
        self.low < other.high && other.low < self.high
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArithmeticOp {
    Add,
    Mul,
}

impl ArithmeticOp {
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            ArithmeticOp::Add => a + b,
            ArithmeticOp::Mul => a * b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "op")]
pub enum DatasetMeta {
    Arithmetic {
        kind: ArithmeticOp,
        range: RangeSpec,
        seed: u64,
    },
    Series {
        origin: SeriesOrigin,
        window: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    /// `[N, in]`
    pub inputs: Matrix<f64>,
    /// `[N, 1]`
    pub targets: Matrix<f64>,
    pub meta: DatasetMeta,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.inputs.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.rows() == 0
    }
}

/// `count` pairs drawn uniformly from `range²` using `rng`.
pub fn gen_arithmetic_with<R: Rng + ?Sized>(
    rng: &mut R,
    seed: u64,
    count: usize,
    op: ArithmeticOp,
    range: RangeSpec,
) -> Result<LabeledDataset> {
    range.validate()?;
    if count == 0 {
        return Err(Error::InvalidParameter("dataset count must be positive".into()));
    }
    let mut inputs = Vec::with_capacity(2 * count);
    let mut targets = Vec::with_capacity(count);
    for _ in 0..count {
        let a = rng.random_range(range.low..range.high);
        let b = rng.random_range(range.low..range.high);
        inputs.extend([a, b]);
        targets.push(op.apply(a, b));
    }
    Ok(LabeledDataset {
        inputs: Matrix::new(count, 2, inputs)?,
        targets: Matrix::column(targets),
        meta: DatasetMeta::Arithmetic {
            kind: op,
            range,
            seed,
        },
    })
}

pub fn gen_arithmetic(
    seed: u64,
    count: usize,
    op: ArithmeticOp,
    range: RangeSpec,
) -> Result<LabeledDataset> {
    gen_arithmetic_with(&mut ChaCha8Rng::seed_from_u64(seed), seed, count, op, range)
}

/// Train and test sets over disjoint input ranges, drawn from one seeded stream.
pub fn extrapolation_split(
    op: ArithmeticOp,
    train_range: RangeSpec,
    test_range: RangeSpec,
    train_count: usize,
    test_count: usize,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    train_range.validate()?;
    test_range.validate()?;
    if train_range.overlaps(&test_range) {
        return Err(Error::OverlappingRanges(
            train_range.low,
            train_range.high,
            test_range.low,
            test_range.high,
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let train = gen_arithmetic_with(&mut rng, seed, train_count, op, train_range)?;
    let test = gen_arithmetic_with(&mut rng, seed, test_count, op, test_range)?;
    Ok((train, test))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "source")]
pub enum SeriesOrigin {
    Synthetic {
        seed: u64,
        drift: f64,
        vol: f64,
        start: f64,
    },
    Csv {
        path: PathBuf,
        column: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub values: Vec<f64>,
    pub origin: SeriesOrigin,
}

impl Series {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Geometric random walk `v_{t+1} = v_t · exp(drift + vol · z_t)` with `v_0 = start`.
pub fn gen_synthetic_series(
    seed: u64,
    length: usize,
    drift: f64,
    vol: f64,
    start: f64,
) -> Result<Series> {
    if length == 0 {
        return Err(Error::InvalidParameter("series length must be positive".into()));
    }
    if !(start.is_finite() && start > 0.0) {
        return Err(Error::InvalidParameter(format!("start must be positive, got {start}")));
    }
    if !(vol.is_finite() && vol >= 0.0 && drift.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need finite drift and vol >= 0, got drift={drift} vol={vol}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(length);
    let mut v = start;
    values.push(v);
    for _ in 1..length {
        let z: f64 = rng.sample(StandardNormal);
        v *= (drift + vol * z).exp();
        values.push(v);
    }
    if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::NonFinite("synthetic series"));
    }
    Ok(Series {
        values,
        origin: SeriesOrigin::Synthetic {
            seed,
            drift,
            vol,
            start,
        },
    })
}

/// Reads one named column of a headed CSV file, in file order.
///
/// Rows are numbered from 1 starting at the first data row.
pub fn load_csv_series(path: impl AsRef<Path>, column: &str) -> Result<Series> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let csv_err = |e: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let idx = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .position(|h| h.trim() == column)
        .ok_or_else(|| Error::ColumnNotFound {
            path: path.to_path_buf(),
            column: column.to_string(),
        })?;
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = i + 1;
        let cell = record.get(idx).unwrap_or("").trim();
        let value = cell
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::ParseCell {
                row,
                column: column.to_string(),
                value: cell.to_string(),
            })?;
        values.push(value);
    }
    Ok(Series {
        values,
        origin: SeriesOrigin::Csv {
            path: path.to_path_buf(),
            column: column.to_string(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalize {
    None,
    #[default]
    MinmaxTrain,
}

/// Affine map `v ↦ (v − min) / (max − min)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: f64,
    pub max: f64,
}

impl MinMaxScaler {
    pub fn fit(values: &[f64]) -> Self {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { min, max }
    }

    fn span(&self) -> f64 {
        let s = self.max - self.min;
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    pub fn transform(&self, v: f64) -> f64 {
        (v - self.min) / self.span()
    }

    pub fn inverse(&self, v: f64) -> f64 {
        v * self.span() + self.min
    }
}

pub const DEFAULT_SPLIT_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, PartialEq)]
pub struct WindowedSplit {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
    pub split_fraction: f64,
    /// Present when the datasets were min-max scaled.
    pub scaler: Option<MinMaxScaler>,
}

/// Sliding windows `[v_i … v_{i+w−1}] → v_{i+w}` split chronologically:
/// the first `floor(split_fraction · samples)` windows train, the rest test.
pub fn window_series(
    series: &Series,
    window: usize,
    normalize: Normalize,
    split_fraction: f64,
) -> Result<WindowedSplit> {
    if window == 0 {
        return Err(Error::InvalidParameter("window must be >= 1".into()));
    }
    let len = series.len();
    if len < window + 2 {
        return Err(Error::SeriesTooShort { len, window });
    }
    if !(split_fraction > 0.0 && split_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "split fraction must lie in (0, 1), got {split_fraction}"
        )));
    }
    let samples = len - window;
    let train_n = (split_fraction * samples as f64).floor() as usize;
    if train_n == 0 || train_n == samples {
        return Err(Error::InvalidParameter(format!(
            "split fraction {split_fraction} leaves an empty side of {samples} samples"
        )));
    }
    let scaler = match normalize {
        Normalize::None => None,
        // Train windows cover v_0 … v_{train_n + window − 1}.
        Normalize::MinmaxTrain => Some(MinMaxScaler::fit(&series.values[..train_n + window])),
    };
    let scaled: Vec<f64> = match scaler {
        Some(s) => series.values.iter().map(|&v| s.transform(v)).collect(),
        None => series.values.clone(),
    };
    let meta = DatasetMeta::Series {
        origin: series.origin.clone(),
        window,
    };
    let build = |range: std::ops::Range<usize>| -> Result<LabeledDataset> {
        let n = range.len();
        let mut inputs = Vec::with_capacity(n * window);
        let mut targets = Vec::with_capacity(n);
        for i in range {
            inputs.extend_from_slice(&scaled[i..i + window]);
            targets.push(scaled[i + window]);
        }
        Ok(LabeledDataset {
            inputs: Matrix::new(n, window, inputs)?,
            targets: Matrix::column(targets),
            meta: meta.clone(),
        })
    };
    Ok(WindowedSplit {
        train: build(0..train_n)?,
        test: build(train_n..samples)?,
        split_fraction,
        scaler,
    })
}

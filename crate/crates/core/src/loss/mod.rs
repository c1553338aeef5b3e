//! Regression losses and their analytic gradients.
//!
//! Six kinds are supported: the four usual baselines (MSE, MAE, Huber,
//! log-cosh) and the two root-based losses, SR-NARME (`|d|^(1/n_t)`) and
//! DR-NARME (`max(|d|^(1/n_t), 1) · min(|d|^(1/m_t), 1)`), where
//! `d = pred − target`.
//!
//! Per-element terms are reduced over every element of the batch
//! (`N = batch × outputs`), either as a mean (default) or a sum.
//!
//! Root losses have an unbounded derivative at `d = 0`. Gradients use a
//! clamp: for `|d| ≤ clamp_eps` the gradient is exactly zero.
//!
//! [`oracle::loss_value_oracle`] is a second, deliberately naive evaluation
//! path kept for equivalence testing.

pub mod oracle;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    Mse,
    Mae,
    Huber,
    LogCosh,
    SrNarme,
    DrNarme,
}

impl LossKind {
    /// All kinds in comparison-table order.
    pub const TABLE_ORDER: [LossKind; 6] = [
        LossKind::Huber,
        LossKind::LogCosh,
        LossKind::Mse,
        LossKind::Mae,
        LossKind::SrNarme,
        LossKind::DrNarme,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LossKind::Mse => "mse",
            LossKind::Mae => "mae",
            LossKind::Huber => "huber",
            LossKind::LogCosh => "log-cosh",
            LossKind::SrNarme => "sr-narme",
            LossKind::DrNarme => "dr-narme",
        }
    }

    pub fn is_narme(self) -> bool {
        matches!(self, LossKind::SrNarme | LossKind::DrNarme)
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LossKind::TABLE_ORDER
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown loss kind '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reduction {
    #[default]
    Mean,
    Sum,
}

/// Loss selection and hyperparameters.
///
/// Fields irrelevant to `kind` are ignored but still validated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec<T> {
    pub kind: LossKind,
    /// First root order (SR and DR).
    pub n_t: u32,
    /// Second root order (DR only).
    pub m_t: u32,
    /// Huber threshold.
    pub delta: T,
    /// Zero-error guard for root gradients.
    pub clamp_eps: T,
    pub reduction: Reduction,
}

pub const DEFAULT_CLAMP_EPS: f64 = 1e-12;
pub const DEFAULT_DELTA: f64 = 1.0;

impl<T: Scalar> LossSpec<T> {
    pub fn new(kind: LossKind) -> Self {
        Self {
            kind,
            n_t: 1,
            m_t: 1,
            delta: T::lit(DEFAULT_DELTA),
            clamp_eps: T::lit(DEFAULT_CLAMP_EPS),
            reduction: Reduction::Mean,
        }
    }

    pub fn mse() -> Self {
        Self::new(LossKind::Mse)
    }

    pub fn mae() -> Self {
        Self::new(LossKind::Mae)
    }

    pub fn huber(delta: T) -> Self {
        Self {
            delta,
            ..Self::new(LossKind::Huber)
        }
    }

    pub fn log_cosh() -> Self {
        Self::new(LossKind::LogCosh)
    }

    pub fn sr_narme(n_t: u32) -> Self {
        Self {
            n_t,
            ..Self::new(LossKind::SrNarme)
        }
    }

    pub fn dr_narme(n_t: u32, m_t: u32) -> Self {
        Self {
            n_t,
            m_t,
            ..Self::new(LossKind::DrNarme)
        }
    }

    pub fn with_reduction(mut self, reduction: Reduction) -> Self {
        self.reduction = reduction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_t < 1 || self.m_t < 1 {
            return Err(Error::InvalidParameter(format!(
                "root orders must be >= 1 (n_t = {}, m_t = {})",
                self.n_t, self.m_t
            )));
        }
        if !(self.delta.is_finite() && self.delta > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if !(self.clamp_eps > T::zero() && self.clamp_eps <= T::lit(1e-6)) {
            return Err(Error::InvalidParameter(format!(
                "clamp_eps must lie in (0, 1e-6], got {}",
                self.clamp_eps
            )));
        }
        Ok(())
    }

    /// Short human-readable hyperparameter summary for the kind.
    pub fn hyperparameters(&self) -> String {
        match self.kind {
            LossKind::Huber => format!("delta={}", self.delta),
            LossKind::SrNarme => format!("n_t={}", self.n_t),
            LossKind::DrNarme => format!("n_t={} m_t={}", self.n_t, self.m_t),
            _ => String::new(),
        }
    }

    /// Per-element term for error `d`.
    fn term(&self, d: T) -> T {
        let a = d.abs();
        match self.kind {
            LossKind::Mse => d * d,
            LossKind::Mae => a,
            LossKind::Huber => {
                let half = T::lit(0.5);
                if a <= self.delta {
                    half * d * d
                } else {
                    self.delta * a - half * self.delta * self.delta
                }
            }
            // log(cosh(a)) = a + log(1 + e^{-2a}) - log 2, finite for any a.
            LossKind::LogCosh => a + (T::lit(-2.0) * a).exp().ln_1p() - T::lit(2.0).ln(),
            LossKind::SrNarme => root(a, self.n_t),
            // The max factor is 1 below |d| = 1 and the min factor is 1 above it.
            LossKind::DrNarme => {
                if a >= T::one() {
                    root(a, self.n_t)
                } else {
                    root(a, self.m_t)
                }
            }
        }
    }

    /// Derivative of the per-element term with respect to the prediction.
    fn term_grad(&self, d: T) -> T {
        let a = d.abs();
        match self.kind {
            LossKind::Mse => T::lit(2.0) * d,
            LossKind::Mae => d.sign0(),
            LossKind::Huber => {
                if a <= self.delta {
                    d
                } else {
                    self.delta * d.sign0()
                }
            }
            LossKind::LogCosh => d.tanh(),
            LossKind::SrNarme => {
                if a <= self.clamp_eps {
                    T::zero()
                } else {
                    d.sign0() * root_grad(a.max(self.clamp_eps), self.n_t)
                }
            }
            LossKind::DrNarme => {
                if a <= self.clamp_eps {
                    T::zero()
                } else if a >= T::one() {
                    d.sign0() * root_grad(a, self.n_t)
                } else {
                    d.sign0() * root_grad(a.max(self.clamp_eps), self.m_t)
                }
            }
        }
    }

    fn scale(&self, n: usize) -> T {
        match self.reduction {
            Reduction::Mean => T::one() / T::from_count(n),
            Reduction::Sum => T::one(),
        }
    }
}

/// `a^(1/order)` for `a ≥ 0`.
#[inline]
fn root<T: Scalar>(a: T, order: u32) -> T {
    match order {
        1 => a,
        2 => a.sqrt(),
        3 => a.cbrt(),
        _ => a.powf(T::one() / T::from_u32(order).unwrap()),
    }
}

/// `d/da a^(1/order)` for `a > 0`.
#[inline]
fn root_grad<T: Scalar>(a: T, order: u32) -> T {
    if order == 1 {
        return T::one();
    }
    let inv = T::one() / T::from_u32(order).unwrap();
    inv * a.powf(inv - T::one())
}

/// Single-element root term.
///
/// With `m_t = None` this is the SR term `|d|^(1/n_t)`; with `Some(m_t)` it is
/// the DR term `max(|d|^(1/n_t), 1) · min(|d|^(1/m_t), 1)`.
pub fn narme_term<T: Scalar>(d: T, n_t: u32, m_t: Option<u32>) -> Result<T> {
    if n_t < 1 || m_t == Some(0) {
        return Err(Error::InvalidParameter("root orders must be >= 1".into()));
    }
    if !d.is_finite() {
        return Err(Error::NonFinite("narme_term input"));
    }
    let spec = match m_t {
        None => LossSpec::sr_narme(n_t),
        Some(m_t) => LossSpec::dr_narme(n_t, m_t),
    };
    Ok(spec.term(d))
}

/// Paired predictions and targets of identical shape `[batch, outputs]`.
#[derive(Debug, Clone, Copy)]
pub struct PredictionBatch<'a, T> {
    pred: &'a Matrix<T>,
    target: &'a Matrix<T>,
}

impl<'a, T: Scalar> PredictionBatch<'a, T> {
    pub fn new(pred: &'a Matrix<T>, target: &'a Matrix<T>) -> Result<Self> {
        if pred.shape() != target.shape() {
            return Err(Error::ShapeMismatch(format!(
                "pred {:?} vs target {:?}",
                pred.shape(),
                target.shape()
            )));
        }
        if pred.is_empty() {
            return Err(Error::ShapeMismatch("empty prediction batch".into()));
        }
        if !pred.is_finite() {
            return Err(Error::NonFinite("predictions"));
        }
        if !target.is_finite() {
            return Err(Error::NonFinite("targets"));
        }
        Ok(Self { pred, target })
    }

    pub fn pred(&self) -> &'a Matrix<T> {
        self.pred
    }

    pub fn target(&self) -> &'a Matrix<T> {
        self.target
    }

    /// Element count `N = batch × outputs`.
    pub fn len(&self) -> usize {
        self.pred.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pred.is_empty()
    }

    fn diffs(&self) -> impl Iterator<Item = T> + 'a {
        self.pred
            .as_slice()
            .iter()
            .zip(self.target.as_slice())
            .map(|(&p, &t)| p - t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossResult<T> {
    pub value: T,
    /// `∂value/∂pred`, shaped like the predictions.
    pub grad: Matrix<T>,
}

pub fn loss_value<T: Scalar>(spec: &LossSpec<T>, batch: &PredictionBatch<'_, T>) -> Result<T> {
    spec.validate()?;
    let total: T = batch.diffs().map(|d| spec.term(d)).sum();
    Ok(total * spec.scale(batch.len()))
}

pub fn loss_grad<T: Scalar>(
    spec: &LossSpec<T>,
    batch: &PredictionBatch<'_, T>,
) -> Result<Matrix<T>> {
    spec.validate()?;
    let r = spec.scale(batch.len());
    let grads = batch.diffs().map(|d| spec.term_grad(d) * r).collect();
    let (rows, cols) = batch.pred.shape();
    Matrix::new(rows, cols, grads)
}

/// Value and gradient in a single pass.
pub fn evaluate<T: Scalar>(
    spec: &LossSpec<T>,
    batch: &PredictionBatch<'_, T>,
) -> Result<LossResult<T>> {
    spec.validate()?;
    let r = spec.scale(batch.len());
    let mut total = T::zero();
    let mut grads = Vec::with_capacity(batch.len());
    for d in batch.diffs() {
        total += spec.term(d);
        grads.push(spec.term_grad(d) * r);
    }
    let (rows, cols) = batch.pred.shape();
    Ok(LossResult {
        value: total * r,
        grad: Matrix::new(rows, cols, grads)?,
    })
}

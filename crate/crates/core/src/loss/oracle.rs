//! Reference loss evaluation: direct formulas, one element at a time.

use super::{LossKind, LossSpec, PredictionBatch, Reduction};
use crate::error::Result;
use crate::scalar::Scalar;

pub fn loss_value_oracle<T: Scalar>(
    spec: &LossSpec<T>,
    batch: &PredictionBatch<'_, T>,
) -> Result<T> {
    spec.validate()?;
    let pred = batch.pred().as_slice();
    let target = batch.target().as_slice();
    let one = T::one();
    let mut total = T::zero();
    let mut count = T::zero();
    for i in 0..pred.len() {
        let d = pred[i] - target[i];
        let term = match spec.kind {
            LossKind::Mse => d * d,
            LossKind::Mae => d.abs(),
            LossKind::Huber => {
                if d.abs() <= spec.delta {
                    T::lit(0.5) * d * d
                } else {
                    spec.delta * d.abs() - T::lit(0.5) * spec.delta * spec.delta
                }
            }
            LossKind::LogCosh => d.cosh().ln(),
            LossKind::SrNarme => {
                let n = T::from_u32(spec.n_t).unwrap();
                d.abs().powf(one / n)
            }
            LossKind::DrNarme => {
                let n = T::from_u32(spec.n_t).unwrap();
                let m = T::from_u32(spec.m_t).unwrap();
                d.abs().powf(one / n).max(one) * d.abs().powf(one / m).min(one)
            }
        };
        total += term;
        count += one;
    }
    Ok(match spec.reduction {
        Reduction::Mean => total / count,
        Reduction::Sum => total,
    })
}

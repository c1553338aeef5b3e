//! Test-set metrics reported after training.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn check<T: Scalar>(pred: &[T], target: &[T]) -> Result<()> {
    if pred.len() != target.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} predictions for {} targets",
            pred.len(),
            target.len()
        )));
    }
    Ok(())
}

/// Sum of squared errors, reported as "overall variance".
pub fn overall_variance<T: Scalar>(pred: &[T], target: &[T]) -> Result<T> {
    check(pred, target)?;
    Ok(pred
        .iter()
        .zip(target)
        .map(|(&p, &t)| (p - t) * (p - t))
        .sum())
}

pub fn mean_abs_error<T: Scalar>(pred: &[T], target: &[T]) -> Result<T> {
    check(pred, target)?;
    if pred.is_empty() {
        return Ok(T::zero());
    }
    let total: T = pred.iter().zip(target).map(|(&p, &t)| (p - t).abs()).sum();
    Ok(total / T::from_count(pred.len()))
}

pub const DEFAULT_DECIMALS: u32 = 6;

/// Largest `k ≤ max_decimals` with every `|pred − target| < 0.5·10^(−k)`; 0 if none.
pub fn decimal_accuracy<T: Scalar>(pred: &[T], target: &[T], max_decimals: u32) -> Result<u32> {
    check(pred, target)?;
    let worst = pred
        .iter()
        .zip(target)
        .map(|(&p, &t)| (p - t).abs())
        .fold(T::zero(), T::max);
    let mut best = 0;
    for k in 0..=max_decimals {
        if worst < T::lit(0.5 * 10f64.powi(-(k as i32))) {
            best = k;
        } else {
            break;
        }
    }
    Ok(best)
}

pub const DEFAULT_REL_TOL: f64 = 0.01;

/// Number of points with `|pred − target| ≤ rel_tol · max(|target|, 1)`.
pub fn correct_count<T: Scalar>(pred: &[T], target: &[T], rel_tol: T) -> Result<usize> {
    check(pred, target)?;
    Ok(pred
        .iter()
        .zip(target)
        .filter(|(&p, &t)| (p - t).abs() <= rel_tol * t.abs().max(T::one()))
        .count())
}

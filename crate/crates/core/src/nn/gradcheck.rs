use crate::error::Result;
use crate::loss::{self, LossSpec, PredictionBatch};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

use super::network::Network;

pub const GRAD_CHECK_STEP: f64 = 1e-6;

/// Denominator floor for the relative error. Central differences at step 1e-6
/// carry round-off near 1e-10, which swamps the relative error of tinier gradients.
pub const GRAD_CHECK_FLOOR: f64 = 1e-4;

/// `|a − b| / max(|a|, |b|, floor)`.
pub fn relative_error<T: Scalar>(a: T, b: T, floor: T) -> T {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// Analytic parameter gradients of `loss(forward(inputs), targets)`.
pub fn analytic_param_grads<T: Scalar>(
    net: &Network<T>,
    spec: &LossSpec<T>,
    inputs: &Matrix<T>,
    targets: &Matrix<T>,
) -> Result<Vec<T>> {
    let mut net = net.clone();
    let pred = net.forward(inputs)?;
    let grad = loss::loss_grad(spec, &PredictionBatch::new(&pred, targets)?)?;
    Ok(net.backward(&grad)?.params)
}

/// Central-difference parameter gradients.
pub fn numeric_param_grads<T: Scalar>(
    net: &Network<T>,
    spec: &LossSpec<T>,
    inputs: &Matrix<T>,
    targets: &Matrix<T>,
    step: T,
) -> Result<Vec<T>> {
    let mut probe = net.clone();
    let base = net.params();
    let mut params = base.clone();
    let mut eval = |params: &[T]| -> Result<T> {
        probe.set_params(params)?;
        let pred = probe.predict(inputs)?;
        loss::loss_value(spec, &PredictionBatch::new(&pred, targets)?)
    };
    let two = T::lit(2.0);
    let mut out = Vec::with_capacity(base.len());
    for i in 0..base.len() {
        params[i] = base[i] + step;
        let plus = eval(&params)?;
        params[i] = base[i] - step;
        let minus = eval(&params)?;
        params[i] = base[i];
        out.push((plus - minus) / (two * step));
    }
    Ok(out)
}

/// Worst relative error between analytic and central-difference parameter
/// gradients (step `1e-6`).
pub fn grad_check<T: Scalar>(
    net: &Network<T>,
    spec: &LossSpec<T>,
    inputs: &Matrix<T>,
    targets: &Matrix<T>,
) -> Result<T> {
    let analytic = analytic_param_grads(net, spec, inputs, targets)?;
    let numeric = numeric_param_grads(net, spec, inputs, targets, T::lit(GRAD_CHECK_STEP))?;
    let floor = T::lit(GRAD_CHECK_FLOOR);
    Ok(analytic
        .into_iter()
        .zip(numeric)
        .map(|(a, n)| relative_error(a, n, floor))
        .fold(T::zero(), T::max))
}

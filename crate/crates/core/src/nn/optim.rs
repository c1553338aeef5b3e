use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::network::Network;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    Sgd,
    #[default]
    Adam,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig<T> {
    pub kind: OptimizerKind,
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
}

impl<T: Scalar> OptimizerConfig<T> {
    pub fn sgd(lr: T) -> Self {
        Self {
            kind: OptimizerKind::Sgd,
            ..Self::adam(lr)
        }
    }

    /// Adam with `(beta1, beta2, eps) = (0.9, 0.999, 1e-8)`.
    pub fn adam(lr: T) -> Self {
        Self {
            kind: OptimizerKind::Adam,
            lr,
            beta1: T::lit(0.9),
            beta2: T::lit(0.999),
            eps: T::lit(1e-8),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lr.is_finite() && self.lr > T::zero()) {
            return Err(Error::InvalidParameter(format!("lr must be positive, got {}", self.lr)));
        }
        let unit = |b: T| b >= T::zero() && b < T::one();
        if self.kind == OptimizerKind::Adam
            && !(unit(self.beta1) && unit(self.beta2) && self.eps > T::zero())
        {
            return Err(Error::InvalidParameter(
                "adam needs beta1, beta2 in [0, 1) and eps > 0".into(),
            ));
        }
        Ok(())
    }
}

impl<T: Scalar> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self::adam(T::lit(1e-3))
    }
}

/// Optimizer hyperparameters plus moment accumulators mirroring the parameter view.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState<T> {
    pub config: OptimizerConfig<T>,
    pub first_moment: Vec<T>,
    pub second_moment: Vec<T>,
    pub step_count: u64,
}

impl<T: Scalar> OptimizerState<T> {
    pub fn new(config: OptimizerConfig<T>, param_count: usize) -> Result<Self> {
        config.validate()?;
        let moments = match config.kind {
            OptimizerKind::Sgd => 0,
            OptimizerKind::Adam => param_count,
        };
        Ok(Self {
            config,
            first_moment: vec![T::zero(); moments],
            second_moment: vec![T::zero(); moments],
            step_count: 0,
        })
    }

    /// Applies one update to `params` in place.
    pub fn step_params(&mut self, params: &mut [T], grads: &[T]) -> Result<()> {
        if params.len() != grads.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} gradients for {} parameters",
                grads.len(),
                params.len()
            )));
        }
        let c = self.config;
        match c.kind {
            OptimizerKind::Sgd => {
                for (p, &g) in params.iter_mut().zip(grads) {
                    *p -= c.lr * g;
                }
            }
            OptimizerKind::Adam => {
                if self.first_moment.len() != params.len() {
                    return Err(Error::ShapeMismatch(format!(
                        "adam state tracks {} parameters, got {}",
                        self.first_moment.len(),
                        params.len()
                    )));
                }
                let t = i32::try_from(self.step_count + 1).unwrap_or(i32::MAX);
                let one = T::one();
                let bc1 = one - c.beta1.powi(t);
                let bc2 = one - c.beta2.powi(t);
                for i in 0..params.len() {
                    let g = grads[i];
                    let m = &mut self.first_moment[i];
                    let v = &mut self.second_moment[i];
                    *m = c.beta1 * *m + (one - c.beta1) * g;
                    *v = c.beta2 * *v + (one - c.beta2) * g * g;
                    let m_hat = *m / bc1;
                    let v_hat = *v / bc2;
                    params[i] -= c.lr * m_hat / (v_hat.sqrt() + c.eps);
                }
            }
        }
        self.step_count += 1;
        Ok(())
    }

    pub fn step(&mut self, net: &mut Network<T>, grads: &[T]) -> Result<()> {
        let mut params = net.params();
        self.step_params(&mut params, grads)?;
        net.set_params(&params)
    }
}

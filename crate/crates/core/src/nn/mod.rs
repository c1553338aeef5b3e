//! Minimal trainable networks: dense layers, NAC and NALU cells with exact
//! backpropagation, plus SGD/Adam updates over a flat parameter view.

mod gradcheck;
mod layer;
mod network;
mod optim;

pub use gradcheck::{
    analytic_param_grads, grad_check, numeric_param_grads, relative_error, GRAD_CHECK_FLOOR,
    GRAD_CHECK_STEP,
};
pub use layer::{
    Activation, DenseLayer, Layer, NacCell, NaluCell, ARITHMETIC_INIT_BOUND, DEFAULT_LOG_EPS,
};
pub use network::{Gradients, Network};
pub use optim::{OptimizerConfig, OptimizerKind, OptimizerState};

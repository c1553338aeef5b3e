//! Root-based regression losses (SR-NARME, DR-NARME) and the baselines they
//! are measured against, with NAC/NALU arithmetic cells, seeded data
//! generators and a training harness that records epochs-to-threshold.
//!
//! Losses, layers and optimizers are generic over [`Scalar`] (`f32` or
//! `f64`). The training harness and the benchmark CLI run in `f64`.
//!
//! ```
//! use narme::{LossSpec64, Matrix64};
//! use narme::loss::{loss_value, PredictionBatch};
//!
//! let pred = Matrix64::new(1, 1, vec![1.4]).unwrap();
//! let target = Matrix64::new(1, 1, vec![1.0]).unwrap();
//! let batch = PredictionBatch::new(&pred, &target).unwrap();
//! let v = loss_value(&LossSpec64::sr_narme(3), &batch).unwrap();
//! assert!((v - 0.4f64.powf(1.0 / 3.0)).abs() < 1e-12);
//! ```

pub mod cli;
pub mod data;
pub mod error;
pub mod loss;
pub mod matrix;
pub mod metrics;
pub mod nn;
pub mod report;
pub mod scalar;
pub mod train;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix64 = matrix::Matrix<f64>;
pub type Matrix32 = matrix::Matrix<f32>;
pub type LossSpec64 = loss::LossSpec<f64>;
pub type LossSpec32 = loss::LossSpec<f32>;
pub type Network64 = nn::Network<f64>;
pub type Network32 = nn::Network<f32>;
pub type Layer64 = nn::Layer<f64>;
pub type Layer32 = nn::Layer<f32>;
pub type OptimizerState64 = nn::OptimizerState<f64>;
pub type OptimizerState32 = nn::OptimizerState<f32>;

//! Helpers shared by the integration and acceptance suites.
#![allow(dead_code)]

use narme::loss::{LossKind, LossSpec};
use narme::matrix::Matrix;
use narme::nn::{grad_check, Activation, DenseLayer, Layer, NacCell, NaluCell, Network};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Matrix<f64> {
    let data = (0..rows * cols).map(|_| r.random_range(lo..hi)).collect();
    Matrix::new(rows, cols, data).unwrap()
}

/// Spec with non-default hyperparameters so every field is exercised.
pub fn spec_for(kind: LossKind) -> LossSpec<f64> {
    LossSpec {
        n_t: 4,
        m_t: 3,
        ..LossSpec::new(kind)
    }
}

/// Random prediction/target pair; differences span both sides of 1.
pub fn random_batch(r: &mut ChaCha8Rng) -> (Matrix<f64>, Matrix<f64>) {
    let rows = r.random_range(1..=8);
    let cols = r.random_range(1..=3);
    let pred = random_matrix(r, rows, cols, -5.0, 5.0);
    let target = random_matrix(r, rows, cols, -5.0, 5.0);
    (pred, target)
}

/// An error offset at least 0.1 away from 0 and from 1, where Huber
/// (δ = 1) and the double root switch branches.
pub fn safe_offset(r: &mut ChaCha8Rng) -> f64 {
    let mag = if r.random_bool(0.5) {
        r.random_range(0.1..0.9)
    } else {
        r.random_range(1.1..3.0)
    };
    if r.random_bool(0.5) {
        mag
    } else {
        -mag
    }
}

#[derive(Debug, Clone, Copy)]
pub enum LayerType {
    Dense,
    Nac,
    Nalu,
}

pub const LAYER_TYPES: [LayerType; 3] = [LayerType::Dense, LayerType::Nac, LayerType::Nalu];

/// Worst grad-check error over `points` seeded (network, input, target)
/// draws of a single layer of type `layer` trained with `kind`.
pub fn worst_grad_error(kind: LossKind, layer: LayerType, points: usize, seed: u64) -> f64 {
    let spec = spec_for(kind);
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..points {
        let l: Layer<f64> = match layer {
            LayerType::Dense => DenseLayer::xavier(&mut r, 3, 2, Activation::Identity).into(),
            LayerType::Nac => NacCell::init(&mut r, 3, 2).into(),
            LayerType::Nalu => NaluCell::init(&mut r, 3, 2).into(),
        };
        let net = Network::new(vec![l]).unwrap();
        // Positive inputs keep the NALU log path well inside its domain.
        let x = random_matrix(&mut r, 4, 3, 0.5, 3.0);
        let pred = net.predict(&x).unwrap();
        let offsets: Vec<f64> = (0..pred.len()).map(|_| safe_offset(&mut r)).collect();
        let target = Matrix::new(
            pred.rows(),
            pred.cols(),
            pred.as_slice().iter().zip(&offsets).map(|(p, o)| p - o).collect(),
        )
        .unwrap();
        worst = worst.max(grad_check(&net, &spec, &x, &target).unwrap());
    }
    worst
}

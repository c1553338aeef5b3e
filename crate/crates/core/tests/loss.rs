mod common;

use common::{random_batch, rng, spec_for, worst_grad_error, LAYER_TYPES};
use narme::loss::oracle::loss_value_oracle;
use narme::loss::{
    evaluate, loss_grad, loss_value, narme_term, LossKind, LossSpec, PredictionBatch, Reduction,
};
use narme::matrix::Matrix;
use proptest::prelude::*;

fn single(d: f64) -> (Matrix<f64>, Matrix<f64>) {
    (Matrix::column(vec![d]), Matrix::column(vec![0.0]))
}

fn value_at(spec: &LossSpec<f64>, d: f64) -> f64 {
    let (p, t) = single(d);
    loss_value(spec, &PredictionBatch::new(&p, &t).unwrap()).unwrap()
}

#[test]
fn matches_oracle_on_seeded_batches() {
    for kind in LossKind::TABLE_ORDER {
        let mut r = rng(7);
        for reduction in [Reduction::Mean, Reduction::Sum] {
            let spec = spec_for(kind).with_reduction(reduction);
            for _ in 0..200 {
                let (p, t) = random_batch(&mut r);
                let b = PredictionBatch::new(&p, &t).unwrap();
                let fast = loss_value(&spec, &b).unwrap();
                let slow = loss_value_oracle(&spec, &b).unwrap();
                assert!((fast - slow).abs() <= 1e-12, "{kind}: {fast} vs {slow}");
            }
        }
    }
}

#[test]
fn mae_mean_and_sum() {
    let p = Matrix::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    let t = Matrix::new(2, 2, vec![0.0, 0.0, 0.0, 0.0]).unwrap();
    let b = PredictionBatch::new(&p, &t).unwrap();
    assert_eq!(loss_value(&LossSpec::mae(), &b).unwrap(), 2.5);
    let sum = LossSpec::mae().with_reduction(Reduction::Sum);
    assert_eq!(loss_value(&sum, &b).unwrap(), 10.0);
    // Mean divides by every element, not by rows.
    let g = loss_grad(&LossSpec::mae(), &b).unwrap();
    assert!(g.as_slice().iter().all(|&v| v == 0.25));
}

#[test]
fn unit_order_roots_reduce_to_mae() {
    let mut r = rng(3);
    for _ in 0..100 {
        let (p, t) = random_batch(&mut r);
        let b = PredictionBatch::new(&p, &t).unwrap();
        let mae = loss_value(&LossSpec::mae(), &b).unwrap();
        assert!((loss_value(&LossSpec::sr_narme(1), &b).unwrap() - mae).abs() <= 1e-12);
        assert!((loss_value(&LossSpec::dr_narme(1, 1), &b).unwrap() - mae).abs() <= 1e-12);
    }
}

#[test]
fn double_root_takes_outer_root_above_one_and_inner_below() {
    let grid: [f64; 13] = [0.0, 0.1, -0.1, 0.4, -0.4, 0.9, -0.9, 1.0, -1.0, 2.0, -2.0, 5.0, -5.0];
    for (n, m) in [(10, 3), (8, 3), (3, 8), (2, 2)] {
        for d in grid {
            let a: f64 = d.abs();
            let (order, direct) = if a >= 1.0 {
                (n, a.powf(1.0 / n as f64))
            } else {
                (m, a.powf(1.0 / m as f64))
            };
            let got = narme_term(d, n, Some(m)).unwrap();
            // Orders 2 and 3 use sqrt/cbrt, which may differ from powf in the last bit.
            assert!((got - direct).abs() <= 1e-15 * direct.max(1.0));
            let expected = narme_term(d, order, None).unwrap();
            assert_eq!(got, expected, "d={d} n={n} m={m}");
        }
    }
}

#[test]
fn root_terms_order_monotone() {
    for d in [0.05, 0.3, 0.7, 0.99] {
        for n in 1..12 {
            assert!(narme_term(d, n + 1, None).unwrap() > narme_term(d, n, None).unwrap());
        }
    }
    for d in [1.01, 2.0, 7.5, 300.0] {
        for n in 1..12 {
            assert!(narme_term(d, n + 1, None).unwrap() < narme_term(d, n, None).unwrap());
        }
    }
    for n in 1..=12 {
        assert_eq!(narme_term(1.0, n, None).unwrap(), 1.0);
        assert_eq!(narme_term(0.0, n, None).unwrap(), 0.0);
    }
}

#[test]
fn layer_gradients_match_finite_differences() {
    for kind in LossKind::TABLE_ORDER {
        for layer in LAYER_TYPES {
            let err = worst_grad_error(kind, layer, 20, 11);
            assert!(err <= 1e-5, "{kind} on {layer:?}: {err}");
        }
    }
}

#[test]
fn loss_gradient_matches_finite_differences() {
    let h = 1e-6;
    let mut r = rng(5);
    for kind in LossKind::TABLE_ORDER {
        let spec = spec_for(kind);
        for _ in 0..200 {
            let d = common::safe_offset(&mut r);
            let (p, t) = single(d);
            let g = loss_grad(&spec, &PredictionBatch::new(&p, &t).unwrap()).unwrap();
            let numeric = (value_at(&spec, d + h) - value_at(&spec, d - h)) / (2.0 * h);
            let a = g.get(0, 0);
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-4);
            assert!(rel <= 1e-5, "{kind} at d={d}: {a} vs {numeric}");
        }
    }
}

#[test]
fn evaluate_agrees_with_separate_calls() {
    let mut r = rng(9);
    for kind in LossKind::TABLE_ORDER {
        let (p, t) = random_batch(&mut r);
        let b = PredictionBatch::new(&p, &t).unwrap();
        let spec = spec_for(kind);
        let both = evaluate(&spec, &b).unwrap();
        assert_eq!(both.value, loss_value(&spec, &b).unwrap());
        assert_eq!(both.grad, loss_grad(&spec, &b).unwrap());
    }
}

#[test]
fn f32_tracks_f64() {
    let p = Matrix::<f32>::new(1, 3, vec![1.4, -0.2, 3.0]).unwrap();
    let t = Matrix::<f32>::new(1, 3, vec![1.0, 0.0, 0.5]).unwrap();
    let widen = |m: &Matrix<f32>| {
        Matrix::new(m.rows(), m.cols(), m.as_slice().iter().map(|&v| f64::from(v)).collect()).unwrap()
    };
    let (p64, t64) = (widen(&p), widen(&t));
    for kind in LossKind::TABLE_ORDER {
        let v32 = loss_value(&LossSpec::<f32>::new(kind), &PredictionBatch::new(&p, &t).unwrap()).unwrap();
        let v64 = loss_value(&LossSpec::<f64>::new(kind), &PredictionBatch::new(&p64, &t64).unwrap()).unwrap();
        assert!((f64::from(v32) - v64).abs() < 1e-5 * v64.max(1.0), "{kind}");
    }
}

fn kinds() -> impl Strategy<Value = LossKind> {
    prop::sample::select(LossKind::TABLE_ORDER.to_vec())
}

proptest! {
    #[test]
    fn oracle_equivalence(
        kind in kinds(),
        pairs in prop::collection::vec((-20.0f64..20.0, -20.0f64..20.0), 1..24),
        n in 1u32..12,
        m in 1u32..12,
    ) {
        let spec = LossSpec { n_t: n, m_t: m, ..LossSpec::new(kind) };
        let p = Matrix::column(pairs.iter().map(|x| x.0).collect());
        let t = Matrix::column(pairs.iter().map(|x| x.1).collect());
        let b = PredictionBatch::new(&p, &t).unwrap();
        let fast = loss_value(&spec, &b).unwrap();
        let slow = loss_value_oracle(&spec, &b).unwrap();
        prop_assert!((fast - slow).abs() <= 1e-12 * slow.abs().max(1.0));
    }

    #[test]
    fn nonnegative_and_symmetric(kind in kinds(), d in -50.0f64..50.0) {
        let spec = spec_for(kind);
        let v = value_at(&spec, d);
        prop_assert!(v >= 0.0);
        prop_assert_eq!(v, value_at(&spec, -d));
    }

    #[test]
    fn zero_only_at_perfect_fit(kind in kinds(), d in 1e-6f64..50.0) {
        prop_assert_eq!(value_at(&spec_for(kind), 0.0), 0.0);
        prop_assert!(value_at(&spec_for(kind), d) > 0.0);
    }

    #[test]
    fn nondecreasing_in_error_magnitude(kind in kinds(), a in 0.0f64..30.0, b in 0.0f64..30.0) {
        let spec = spec_for(kind);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(value_at(&spec, lo) <= value_at(&spec, hi));
    }

    #[test]
    fn gradient_sign_follows_error(kind in kinds(), d in -30.0f64..30.0) {
        let spec = spec_for(kind);
        let (p, t) = single(d);
        let g = loss_grad(&spec, &PredictionBatch::new(&p, &t).unwrap()).unwrap().get(0, 0);
        prop_assert!(g * d >= 0.0);
        if d.abs() <= spec.clamp_eps {
            prop_assert_eq!(g, 0.0);
        }
    }

    #[test]
    fn sum_is_mean_times_count(kind in kinds(), vals in prop::collection::vec(-5.0f64..5.0, 1..30)) {
        let p = Matrix::column(vals.clone());
        let t = Matrix::zeros(vals.len(), 1);
        let b = PredictionBatch::new(&p, &t).unwrap();
        let mean = loss_value(&spec_for(kind), &b).unwrap();
        let sum = loss_value(&spec_for(kind).with_reduction(Reduction::Sum), &b).unwrap();
        prop_assert!((sum - mean * vals.len() as f64).abs() <= 1e-9 * sum.abs().max(1.0));
    }
}

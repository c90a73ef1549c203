mod common;

use common::*;
use ndarray::Array2;
use rand::Rng;
use srl_soa::hsi::flatten_pixels;
use srl_soa::operational::{backward, conv1d_same, decoder_reconstruct, encoder_forward, grad_check, loss};
use srl_soa::synthetic::{planted_mixture, PlantedSpec};
use srl_soa::trainer::{epoch_mean_loss, init_params, rank_bands, train, train_with, TrainConfig};

#[test]
fn encoder_and_decoder_match_naive_loops() {
    let mut r = rng(11);
    for trial in 0..50 {
        let fs = [1, 3, 5, 7][trial % 4];
        let n = r.random_range(fs.max(2)..=12);
        let q = r.random_range(1..=4);
        let m = r.random_range(1..=4);
        let p = random_params(&mut r, n, q, fs, 0.7);
        let xs = random_matrix(&mut r, m, n);
        let rep = encoder_forward(&xs, &p).unwrap();
        let oracle = naive_encoder(&p, &xs);
        let diff = (&rep.per_sample - &oracle).mapv(f64::abs).fold(0.0f64, |a, &b| a.max(b));
        assert!(diff <= 1e-12, "trial {trial}: encoder diff {diff}");
        let x_hat = decoder_reconstruct(&xs, &rep).unwrap();
        let diff = (&x_hat - &naive_decoder(&xs, &oracle)).mapv(f64::abs).fold(0.0f64, |a, &b| a.max(b));
        assert!(diff <= 1e-12, "trial {trial}: decoder diff {diff}");
        let l = loss(&xs, &x_hat, &rep, 0.03);
        assert!((l - naive_loss(&xs, &oracle, 0.03)).abs() <= 1e-10 * l.max(1.0));
    }
}

#[test]
fn conv_same_hand_expanded() {
    assert_eq!(conv1d_same(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]).unwrap(), vec![3.0, 6.0, 5.0]);
    assert_eq!(conv1d_same(&[1.0, 2.0, 3.0], &[0.0, 1.0, 0.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    // Cross-correlation: kernel (1, 0, 0) looks one position to the left.
    assert_eq!(conv1d_same(&[1.0, 2.0, 3.0], &[1.0, 0.0, 0.0]).unwrap(), vec![0.0, 1.0, 2.0]);
    assert_eq!(conv1d_same(&[4.0, -1.0, 2.0, 0.5], &[2.0]).unwrap(), vec![8.0, -2.0, 4.0, 1.0]);
    assert_eq!(
        conv1d_same(&[1.0, 0.0, 0.0, 0.0, 0.0], &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(),
        vec![3.0, 2.0, 1.0, 0.0, 0.0]
    );
}

#[test]
fn first_order_layer_is_conv_plus_tanh() {
    let mut r = rng(5);
    let (n, fs) = (9, 3);
    let p = random_params(&mut r, n, 1, fs, 0.8);
    let xs = random_matrix(&mut r, 3, n);
    let rep = encoder_forward(&xs, &p).unwrap();
    for i in 0..3 {
        let x: Vec<f64> = xs.row(i).to_vec();
        for k in 0..n {
            let c = conv1d_same(&x, p.kernel(k, 0)).unwrap();
            for j in 0..n {
                let want = if j == k { 0.0 } else { (c[j] + p.bias(k, 0)).tanh() };
                assert!((rep.per_sample[[i, k, j]] - want).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn gradients_match_finite_differences_on_100_instances() {
    let mut r = rng(21);
    let (mut worst, mut checked) = (0.0f64, 0);
    while checked < 100 {
        let q = [1, 3, 5][r.random_range(0..3)];
        let fs = [3, 5, 7][r.random_range(0..3)];
        let n = r.random_range(fs..=16);
        let m = [1, 2, 5][r.random_range(0..3)];
        let p = random_params(&mut r, n, q, fs, 0.5);
        let xs = random_matrix(&mut r, m, n);
        if min_offdiagonal_abs(&p, &xs) <= 1e-4 {
            // A probe of 1e-5 could cross the kink of |A| at zero.
            continue;
        }
        checked += 1;
        worst = worst.max(grad_check(&p, &xs, 0.01, 1e-5).unwrap());
    }
    assert!(worst <= 1e-4, "max relative error {worst}");
}

#[test]
fn backward_loss_matches_forward_route() {
    let mut r = rng(8);
    let p = random_params(&mut r, 10, 3, 5, 0.5);
    let xs = random_matrix(&mut r, 4, 10);
    let (parts, _) = backward(&xs, &p, 0.02).unwrap();
    let rep = encoder_forward(&xs, &p).unwrap();
    let x_hat = decoder_reconstruct(&xs, &rep).unwrap();
    assert!((parts.total - loss(&xs, &x_hat, &rep, 0.02)).abs() < 1e-12);
}

fn small_planted() -> Array2<f64> {
    let spec = PlantedSpec {
        height: 10,
        width: 10,
        bands: 16,
        seed: 3,
        ..PlantedSpec::default()
    };
    flatten_pixels(&planted_mixture(&spec).unwrap().cube)
}

#[test]
fn structural_invariants_hold_on_every_step() {
    let xt = small_planted();
    let cfg = TrainConfig {
        epochs: 5,
        filter_size: 5,
        ..TrainConfig::default()
    };
    let mut steps = 0;
    let outcome = train_with(&xt, &cfg, |view| {
        let rep = encoder_forward(view.batch, view.params).unwrap();
        for a in rep.per_sample.outer_iter() {
            for k in 0..a.nrows() {
                assert_eq!(a[[k, k]], 0.0);
            }
            assert!(a.iter().all(|v| v.abs() < 1.0));
        }
        assert!(rep.mean_abs.iter().all(|&v| v >= 0.0));
        let ranking = rank_bands(view.params, view.batch, 2).unwrap();
        assert!(ranking.alpha.iter().all(|&v| v >= 0.0));
        steps += 1;
    })
    .unwrap();
    assert_eq!(steps, 5 * 20);
    assert_eq!(outcome.history.len(), steps);
}

#[test]
fn exact_mixtures_are_learned_without_sparsity() {
    // Every band is an exact convex mix of three sources.
    let mut r = rng(17);
    let (m, n) = (120, 12);
    let _ = m;
    let sources = random_matrix(&mut r, m, 3);
    let mut mixing = Array2::<f64>::zeros((3, n));
    for j in 0..n {
        let w: Vec<f64> = (0..3).map(|_| r.random::<f64>() + 0.05).collect();
        let t: f64 = w.iter().sum();
        for s in 0..3 {
            mixing[[s, j]] = w[s] / t;
        }
    }
    let xt = sources.dot(&mixing);
    let cfg = TrainConfig {
        lambda: 0.0,
        filter_size: 3,
        seed: 4,
        ..TrainConfig::default()
    };
    let fidelity = |p: &srl_soa::operational::OperationalLayerParams| {
        let rep = encoder_forward(&xt, p).unwrap();
        let x_hat = decoder_reconstruct(&xt, &rep).unwrap();
        0.5 * (&xt - &x_hat).mapv(|v| v * v).sum()
    };
    let before = fidelity(&init_params(n, &cfg).unwrap());
    let after = fidelity(&train(&xt, &cfg).unwrap().params);
    assert!(after < 0.1 * before, "fidelity {before} -> {after}");
}

#[test]
fn loss_decreases_end_to_end_on_planted_data() {
    let xt = small_planted();
    let cfg = TrainConfig {
        filter_size: 5,
        seed: 9,
        ..TrainConfig::default()
    };
    let outcome = train(&xt, &cfg).unwrap();
    let means = epoch_mean_loss(&outcome.history);
    assert_eq!(means.len(), 50);
    assert!(means[49] < means[0], "{} vs {}", means[49], means[0]);
}

#[test]
fn alpha_ignores_chunk_size_and_thread_count() {
    let xt = small_planted();
    let cfg = TrainConfig {
        epochs: 2,
        filter_size: 5,
        ..TrainConfig::default()
    };
    let params = train(&xt, &cfg).unwrap().params;
    let whole = rank_bands(&params, &xt, xt.nrows()).unwrap();
    let single = rank_bands(&params, &xt, 1).unwrap();
    for (a, b) in whole.alpha.iter().zip(&single.alpha) {
        assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-300));
    }
    let pool = |t| rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
    let one = pool(1).install(|| rank_bands(&params, &xt, 7).unwrap());
    let four = pool(4).install(|| rank_bands(&params, &xt, 7).unwrap());
    assert_eq!(one, four);
    assert_eq!(one.alpha, whole.alpha);
}

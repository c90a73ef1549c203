//! Checks the hand-derived gradients against central finite differences,
//! first on one instance and then on a random batch of instances.

use ndarray::Array2;
use rand::Rng;
use srl_soa::cli::{cmd_gradcheck, GradcheckArgs};
use srl_soa::operational::{backward, grad_check, OperationalLayerParams};
use srl_soa::rng::{stream, Stream};

fn main() {
    let mut rng = stream(42, Stream::GradCheck);
    let (n, q, fs, m) = (16, 3, 5, 2);
    let weights = (0..n * q * fs).map(|_| rng.random_range(-0.5..0.5)).collect();
    let biases = (0..n * q).map(|_| rng.random_range(-0.2..0.2)).collect();
    let params = OperationalLayerParams::from_parts(n, q, fs, weights, biases).unwrap();
    let xs = Array2::from_shape_fn((m, n), |_| rng.random::<f64>());

    let (parts, grads) = backward(&xs, &params, 0.01).unwrap();
    println!(
        "loss {:.6} (fidelity {:.6}, sparsity {:.6}), {} parameters",
        parts.total,
        parts.fidelity,
        parts.regularizer,
        params.param_count()
    );
    println!("first weight gradients: {:?}", &grads.d_weights[..4]);
    for step in [1e-3, 1e-5, 1e-7] {
        println!("step {step:e}: max relative error {:e}", grad_check(&params, &xs, 0.01, step).unwrap());
    }

    let mut args = GradcheckArgs {
        configs: 100,
        seed: 0,
        q: None,
        fs: None,
        lambda: 0.01,
        step: 1e-5,
        tolerance: 1e-4,
        corrupt_gradient: false,
    };
    let (err, pass) = cmd_gradcheck(&args).unwrap();
    println!("100 random instances: max_rel_err={err:e} pass={pass}");
    args.corrupt_gradient = true;
    args.configs = 3;
    let (err, pass) = cmd_gradcheck(&args).unwrap();
    println!("with a corrupted gradient: max_rel_err={err:e} pass={pass}");
}

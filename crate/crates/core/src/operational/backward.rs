use ndarray::Array2;
use rayon::prelude::*;

use super::forward::{check_batch, padded_powers, sample_coefficients};
use super::{decoder_reconstruct, encoder_forward, loss_parts, Gradients, LossParts, OperationalLayerParams};
use crate::error::Result;

struct SampleGrad {
    fidelity: f64,
    abs_sum: f64,
    grads: Gradients,
}

fn subgradient_sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn sample_backward(
    x: ndarray::ArrayView1<'_, f64>,
    params: &OperationalLayerParams,
    reg_scale: f64,
) -> SampleGrad {
    let n = x.len();
    let order = params.order();
    let fs = params.filter_size();
    let stride = n + fs - 1;

    let mut powers = Vec::new();
    padded_powers(x, order, fs, &mut powers);
    let mut a = vec![0.0; n * n];
    sample_coefficients(params, &powers, n, &mut a);

    // residual r = x . A - x
    let mut r: Vec<f64> = x.iter().map(|v| -v).collect();
    for k in 0..n {
        let xk = x[k];
        for (rj, akj) in r.iter_mut().zip(&a[k * n..(k + 1) * n]) {
            *rj += xk * akj;
        }
    }
    let fidelity = 0.5 * r.iter().map(|v| v * v).sum::<f64>();
    let abs_sum = a.iter().map(|v| v.abs()).sum::<f64>();

    let mut grads = Gradients::zeros_like(params);
    let mut dz = vec![0.0; n];
    for k in 0..n {
        let xk = x[k];
        let row = &a[k * n..(k + 1) * n];
        for (j, d) in dz.iter_mut().enumerate() {
            let v = row[j];
            *d = (xk * r[j] + reg_scale * subgradient_sign(v)) * (1.0 - v * v);
        }
        // masked diagonal carries no gradient
        dz[k] = 0.0;

        let dz_sum: f64 = dz.iter().sum();
        for q in 0..order {
            grads.d_biases[k * order + q] = dz_sum;
            let pw = &powers[q * stride..(q + 1) * stride];
            let base = params.weight_index(k, q, 0);
            for t in 0..fs {
                grads.d_weights[base + t] = dz.iter().zip(&pw[t..t + n]).map(|(d, p)| d * p).sum();
            }
        }
    }
    SampleGrad {
        fidelity,
        abs_sum,
        grads,
    }
}

/// Loss and its exact gradient with respect to every weight and bias.
///
/// Samples are processed in parallel; their contributions are added in batch
/// order, so the result does not depend on the thread count.
pub fn backward(
    xs: &Array2<f64>,
    params: &OperationalLayerParams,
    lambda: f64,
) -> Result<(LossParts, Gradients)> {
    check_batch(xs, params)?;
    let m = xs.nrows();
    let reg_scale = if m > 0 { lambda / m as f64 } else { 0.0 };
    let per_sample: Vec<SampleGrad> = (0..m)
        .into_par_iter()
        .map(|i| sample_backward(xs.row(i), params, reg_scale))
        .collect();

    let mut grads = Gradients::zeros_like(params);
    let mut fidelity = 0.0;
    let mut abs_sum = 0.0;
    for s in &per_sample {
        grads.add_assign(&s.grads);
        fidelity += s.fidelity;
        abs_sum += s.abs_sum;
    }
    let regularizer = reg_scale * abs_sum;
    Ok((
        LossParts {
            total: fidelity + regularizer,
            fidelity,
            regularizer,
        },
        grads,
    ))
}

fn forward_loss(xs: &Array2<f64>, params: &OperationalLayerParams, lambda: f64) -> Result<f64> {
    let rep = encoder_forward(xs, params)?;
    let x_hat = decoder_reconstruct(xs, &rep)?;
    Ok(loss_parts(xs, &x_hat, &rep, lambda).total)
}

/// Worst relative error between the analytic gradient and central finite
/// differences of the forward loss, using `max(|a|, |b|, 1e-8)` as denominator.
pub fn grad_check(
    params: &OperationalLayerParams,
    xs: &Array2<f64>,
    lambda: f64,
    step: f64,
) -> Result<f64> {
    grad_check_with(params, xs, lambda, step, |_| {})
}

/// As [`grad_check`], but lets the caller alter the analytic gradient before
/// comparison. Used for negative controls.
pub fn grad_check_with(
    params: &OperationalLayerParams,
    xs: &Array2<f64>,
    lambda: f64,
    step: f64,
    tamper: impl FnOnce(&mut Gradients),
) -> Result<f64> {
    if !(step > 0.0) {
        return Err(crate::error::Error::config("finite-difference step must be positive"));
    }
    let (_, mut grads) = backward(xs, params, lambda)?;
    tamper(&mut grads);
    let mut probe = params.clone();
    let mut worst = 0.0f64;
    for i in 0..params.param_count() {
        let orig = params.get_flat(i);
        probe.set_flat(i, orig + step);
        let up = forward_loss(xs, &probe, lambda)?;
        probe.set_flat(i, orig - step);
        let down = forward_loss(xs, &probe, lambda)?;
        probe.set_flat(i, orig);
        let numeric = (up - down) / (2.0 * step);
        let analytic = grads.get_flat(i);
        let denom = analytic.abs().max(numeric.abs()).max(1e-8);
        worst = worst.max((analytic - numeric).abs() / denom);
    }
    Ok(worst)
}

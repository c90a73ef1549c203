use ndarray::{Array2, Array3, ArrayView1, Axis};
use rayon::prelude::*;

use super::OperationalLayerParams;
use crate::error::{Error, Result};

/// Per-sample coefficient matrices `A_i` (`m x N x N`) and their absolute mean.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationBatch {
    pub per_sample: Array3<f64>,
    pub mean_abs: Array2<f64>,
}

/// `x^1 .. x^Q`, each zero-padded by `f_s / 2` on both sides so the "same"
/// correlation becomes a plain sliding dot product. Row `q` starts at
/// `q * (N + f_s - 1)`.
pub(crate) fn padded_powers(x: ArrayView1<'_, f64>, order: usize, fs: usize, out: &mut Vec<f64>) {
    let n = x.len();
    let half = fs / 2;
    let stride = n + fs - 1;
    out.clear();
    out.resize(order * stride, 0.0);
    for (i, &v) in x.iter().enumerate() {
        let mut p = v;
        for q in 0..order {
            out[q * stride + half + i] = p;
            p *= v;
        }
    }
}

/// Writes the masked `N x N` matrix for one sample into `a` (row-major).
pub(crate) fn sample_coefficients(
    params: &OperationalLayerParams,
    powers: &[f64],
    n: usize,
    a: &mut [f64],
) {
    let order = params.order();
    let fs = params.filter_size();
    let stride = n + fs - 1;
    for k in 0..n {
        let bias: f64 = (0..order).map(|q| params.bias(k, q)).sum();
        let row = &mut a[k * n..(k + 1) * n];
        row.fill(bias);
        for q in 0..order {
            let kernel = params.kernel(k, q);
            let pw = &powers[q * stride..(q + 1) * stride];
            for (i, z) in row.iter_mut().enumerate() {
                let window = &pw[i..i + fs];
                *z += window.iter().zip(kernel).map(|(s, w)| s * w).sum::<f64>();
            }
        }
        for z in row.iter_mut() {
            *z = z.tanh();
        }
        row[k] = 0.0;
    }
}

pub(crate) fn check_batch(xs: &Array2<f64>, params: &OperationalLayerParams) -> Result<()> {
    params.check_input(xs.ncols())?;
    if xs.iter().any(|v| !v.is_finite()) {
        return Err(Error::shape("input batch contains non-finite values"));
    }
    Ok(())
}

/// Runs the encoder on every row of `xs`.
pub fn encoder_forward(
    xs: &Array2<f64>,
    params: &OperationalLayerParams,
) -> Result<RepresentationBatch> {
    check_batch(xs, params)?;
    let (m, n) = xs.dim();
    let mut per_sample = Array3::<f64>::zeros((m, n, n));
    per_sample
        .as_slice_mut()
        .expect("fresh array is contiguous")
        .par_chunks_mut(n * n)
        .enumerate()
        .for_each_init(Vec::new, |powers, (i, a)| {
            padded_powers(xs.row(i), params.order(), params.filter_size(), powers);
            sample_coefficients(params, powers, n, a);
        });

    let mut mean_abs = Array2::<f64>::zeros((n, n));
    for a in per_sample.axis_iter(Axis(0)) {
        mean_abs.zip_mut_with(&a, |acc, v| *acc += v.abs());
    }
    if m > 0 {
        mean_abs /= m as f64;
    }
    Ok(RepresentationBatch {
        per_sample,
        mean_abs,
    })
}

/// `x_hat_i = x_i . A_i` for every sample.
pub fn decoder_reconstruct(xs: &Array2<f64>, rep: &RepresentationBatch) -> Result<Array2<f64>> {
    let (m, n) = xs.dim();
    if rep.per_sample.dim() != (m, n, n) {
        return Err(Error::shape(format!(
            "batch is {m}x{n} but representation is {:?}",
            rep.per_sample.dim()
        )));
    }
    let mut out = Array2::<f64>::zeros((m, n));
    for ((x, a), mut row) in xs
        .axis_iter(Axis(0))
        .zip(rep.per_sample.axis_iter(Axis(0)))
        .zip(out.axis_iter_mut(Axis(0)))
    {
        row.assign(&x.dot(&a));
    }
    Ok(out)
}

/// Fidelity, sparsity penalty and their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParts {
    pub total: f64,
    pub fidelity: f64,
    pub regularizer: f64,
}

pub fn loss_parts(
    xs: &Array2<f64>,
    x_hat: &Array2<f64>,
    rep: &RepresentationBatch,
    lambda: f64,
) -> LossParts {
    let fidelity = 0.5
        * xs.iter()
            .zip(x_hat.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>();
    let regularizer = lambda * rep.mean_abs.sum();
    LossParts {
        total: fidelity + regularizer,
        fidelity,
        regularizer,
    }
}

/// `0.5 * ||X - X_hat||_F^2 + lambda * ||mean |A_i| ||_1`.
pub fn loss(xs: &Array2<f64>, x_hat: &Array2<f64>, rep: &RepresentationBatch, lambda: f64) -> f64 {
    loss_parts(xs, x_hat, rep, lambda).total
}

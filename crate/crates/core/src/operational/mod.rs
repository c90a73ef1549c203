//! The sparse 1D-operational autoencoder: a single layer of generative
//! neurons as encoder, the parameter-free self-representation decoder, the
//! training objective, and its analytic gradient.
//!
//! For a pixel spectrum `x` of length `N`, filter `k` produces row `k` of the
//! pixel's coefficient matrix:
//!
//! ```text
//! A[k, :] = tanh( sum_{q=1..Q} conv_same(x^q, W[k, q, :]) + b[k, q] ),   A[k, k] = 0
//! ```
//!
//! and the decoder reconstructs `x_hat = x . A`, so `A[k, j]` is the weight
//! of input band `k` in output band `j`.

mod backward;
pub(crate) mod forward;
mod params;

pub use backward::{backward, grad_check, grad_check_with};
pub use forward::{decoder_reconstruct, encoder_forward, loss, loss_parts, LossParts, RepresentationBatch};
pub use params::{decode_params, encode_params, load_params, save_params, Gradients, OperationalLayerParams, PARAMS_MAGIC};

use crate::error::{Error, Result};

/// Evaluates `sum_q w[q] * x^q` for `q = 0..w.len()`.
pub fn taylor_transform(x: f64, w: &[f64]) -> f64 {
    let mut power = 1.0;
    let mut acc = 0.0;
    for &c in w {
        acc += c * power;
        power *= x;
    }
    acc
}

/// Cross-correlation with zero "same" padding of `(f_s - 1) / 2` per side.
pub fn conv1d_same(signal: &[f64], kernel: &[f64]) -> Result<Vec<f64>> {
    let n = signal.len();
    let fs = kernel.len();
    if fs.is_multiple_of(2) || fs > n {
        return Err(Error::BadKernelSize { size: fs, len: n });
    }
    let half = fs / 2;
    let out = (0..n)
        .map(|i| {
            kernel
                .iter()
                .enumerate()
                .filter_map(|(j, &w)| {
                    (i + j).checked_sub(half).filter(|&s| s < n).map(|s| signal[s] * w)
                })
                .sum()
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn horner(x: f64, w: &[f64]) -> f64 {
        w.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    #[test]
    fn taylor_examples() {
        assert_eq!(taylor_transform(3.7, &[0.0, 1.0]), 3.7);
        assert_eq!(taylor_transform(2.0, &[1.0, 1.0, 1.0]), 7.0);
        assert_eq!(taylor_transform(5.0, &[]), 0.0);
    }

    #[test]
    fn taylor_matches_horner() {
        use rand::Rng;
        let mut rng = crate::rng::stream(11, crate::rng::Stream::Synthetic);
        for _ in 0..1000 {
            let x: f64 = rng.random_range(-1.5..1.5);
            let w: Vec<f64> = (0..rng.random_range(1..7))
                .map(|_| rng.random_range(-2.0..2.0))
                .collect();
            let a = taylor_transform(x, &w);
            let b = horner(x, &w);
            assert!((a - b).abs() <= 1e-14 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn conv_examples() {
        assert_eq!(
            conv1d_same(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]).unwrap(),
            vec![3.0, 6.0, 5.0]
        );
        let s = [0.3, -1.0, 2.5, 4.0, 0.0];
        assert_eq!(conv1d_same(&s, &[0.0, 0.0, 1.0, 0.0, 0.0]).unwrap(), s.to_vec());
        assert_eq!(conv1d_same(&[0.0; 4], &[0.2, -0.4, 1.0]).unwrap(), vec![0.0; 4]);
        // cross-correlation, not convolution: no kernel flip
        assert_eq!(
            conv1d_same(&[0.0, 1.0, 0.0], &[1.0, 2.0, 3.0]).unwrap(),
            vec![3.0, 2.0, 1.0]
        );
    }

    #[test]
    fn conv_rejects_bad_kernels() {
        assert!(matches!(
            conv1d_same(&[1.0, 2.0, 3.0], &[1.0, 1.0]),
            Err(Error::BadKernelSize { size: 2, len: 3 })
        ));
        assert!(matches!(
            conv1d_same(&[1.0, 2.0, 3.0], &[1.0; 5]),
            Err(Error::BadKernelSize { size: 5, len: 3 })
        ));
    }
}

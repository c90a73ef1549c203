#![allow(dead_code)]

use ndarray::{Array2, Array3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use srl_soa::operational::OperationalLayerParams;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_7e57)
}

pub fn random_params(
    rng: &mut ChaCha8Rng,
    n: usize,
    q: usize,
    fs: usize,
    scale: f64,
) -> OperationalLayerParams {
    let weights = (0..n * q * fs).map(|_| rng.random_range(-scale..scale)).collect();
    let biases = (0..n * q).map(|_| rng.random_range(-scale..scale)).collect();
    OperationalLayerParams::from_parts(n, q, fs, weights, biases).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Array2<f64> {
    Array2::from_shape_fn((m, n), |_| rng.random::<f64>())
}

/// Scalar-loop encoder: `A[k, j] = tanh(sum_q sum_t W[k,q,t] x[j+t-h]^(q+1) + sum_q b[k,q])`.
pub fn naive_encoder(p: &OperationalLayerParams, xs: &Array2<f64>) -> Array3<f64> {
    let (m, n) = xs.dim();
    let (order, fs) = (p.order(), p.filter_size());
    let h = (fs / 2) as isize;
    let mut out = Array3::zeros((m, n, n));
    for i in 0..m {
        for k in 0..n {
            for j in 0..n {
                if j == k {
                    continue;
                }
                let mut z = 0.0;
                for q in 0..order {
                    z += p.biases[k * order + q];
                    for t in 0..fs {
                        let idx = j as isize + t as isize - h;
                        if idx < 0 || idx >= n as isize {
                            continue;
                        }
                        let x = xs[[i, idx as usize]];
                        z += p.weights[(k * order + q) * fs + t] * x.powi(q as i32 + 1);
                    }
                }
                out[[i, k, j]] = z.tanh();
            }
        }
    }
    out
}

/// `x_hat[j] = sum_k x[k] A[k, j]` with plain loops.
pub fn naive_decoder(xs: &Array2<f64>, a: &Array3<f64>) -> Array2<f64> {
    let (m, n) = xs.dim();
    let mut out = Array2::zeros((m, n));
    for i in 0..m {
        for j in 0..n {
            out[[i, j]] = (0..n).map(|k| xs[[i, k]] * a[[i, k, j]]).sum();
        }
    }
    out
}

pub fn naive_loss(xs: &Array2<f64>, a: &Array3<f64>, lambda: f64) -> f64 {
    let x_hat = naive_decoder(xs, a);
    let (m, n) = xs.dim();
    let fid: f64 = xs.iter().zip(x_hat.iter()).map(|(u, v)| (u - v).powi(2)).sum::<f64>() * 0.5;
    let mut reg = 0.0;
    for k in 0..n {
        for j in 0..n {
            reg += (0..m).map(|i| a[[i, k, j]].abs()).sum::<f64>() / m as f64;
        }
    }
    fid + lambda * reg
}

/// Solves a small dense system by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Exhaustive search over all 3-band subsets for the one whose affine least
/// squares fit reconstructs every band with the smallest total error.
/// Returns the best subset and the runner-up error.
pub fn best_triple(x: &Array2<f64>) -> (Vec<usize>, f64, f64) {
    let (m, n) = x.dim();
    // Gram of [1, X].
    let mut ext = Array2::<f64>::ones((m, n + 1));
    ext.slice_mut(ndarray::s![.., 1..]).assign(x);
    let g = ext.t().dot(&ext);
    let total: f64 = (1..=n).map(|b| g[[b, b]]).sum();
    let (mut best, mut best_err, mut second) = (vec![], f64::INFINITY, f64::INFINITY);
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let s = [0, a + 1, b + 1, c + 1];
                let gss: Vec<Vec<f64>> = s.iter().map(|&i| s.iter().map(|&j| g[[i, j]]).collect()).collect();
                let mut explained = 0.0;
                for t in 1..=n {
                    let rhs: Vec<f64> = s.iter().map(|&i| g[[i, t]]).collect();
                    let beta = gauss_solve(gss.clone(), rhs.clone());
                    explained += beta.iter().zip(&rhs).map(|(u, v)| u * v).sum::<f64>();
                }
                let err = total - explained;
                if err < best_err {
                    second = best_err;
                    best_err = err;
                    best = vec![a, b, c];
                } else if err < second {
                    second = err;
                }
            }
        }
    }
    (best, best_err, second)
}

/// Leading eigenpairs by power iteration with deflation.
pub fn power_iteration(sym: &Array2<f64>, k: usize, iters: usize) -> Vec<(f64, Vec<f64>)> {
    let n = sym.nrows();
    let mut a = sym.clone();
    let mut out = Vec::new();
    for e in 0..k {
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i * 7 + e * 3) as f64 % 5.0).collect();
        let mut lambda = 0.0;
        for _ in 0..iters {
            let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[[i, j]] * v[j]).sum()).collect();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            lambda = w.iter().zip(&v).map(|(p, q)| p * q).sum();
            v = w.into_iter().map(|x| x / norm).collect();
        }
        for i in 0..n {
            for j in 0..n {
                a[[i, j]] -= lambda * v[i] * v[j];
            }
        }
        out.push((lambda, v));
    }
    out
}

/// Smallest off-diagonal coefficient magnitude over the batch.
pub fn min_offdiagonal_abs(p: &OperationalLayerParams, xs: &Array2<f64>) -> f64 {
    let a = naive_encoder(p, xs);
    let mut least = f64::INFINITY;
    for ((_, k, j), v) in a.indexed_iter() {
        if k != j {
            least = least.min(v.abs());
        }
    }
    least
}

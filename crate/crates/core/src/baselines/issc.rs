use ndarray::Array2;
use rayon::prelude::*;

use super::linalg::{cholesky, cholesky_solve};
use crate::error::{Error, Result};
use crate::trainer::BandRanking;

pub const DEFAULT_RIDGE_LAMBDA: f64 = 1e-3;

/// Ridge self-representation coefficients; column `j` reconstructs band `j`
/// from all other bands.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeSelfRepresentation {
    pub coefficients: Array2<f64>,
    pub ridge_lambda: f64,
}

/// Solves `min_w ||x_j - X_{-j} w||^2 + lambda ||w||^2` for every band `j`
/// through the normal equations on the shared Gram matrix `X^T X`.
pub fn ridge_self_representation(x: &Array2<f64>, ridge_lambda: f64) -> Result<RidgeSelfRepresentation> {
    let (m, n) = x.dim();
    if m == 0 {
        return Err(Error::shape("ridge self-representation needs at least one sample"));
    }
    if !(ridge_lambda > 0.0 && ridge_lambda.is_finite()) {
        return Err(Error::config("ridge lambda must be positive"));
    }
    let gram = x.t().dot(x);
    let columns: Vec<Result<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let (system, rhs) = reduced_system(&gram, j, ridge_lambda);
            let l = cholesky(&system).ok_or(Error::SingularSystem(j))?;
            Ok(cholesky_solve(&l, &rhs))
        })
        .collect();

    let mut coefficients = Array2::<f64>::zeros((n, n));
    for (j, col) in columns.into_iter().enumerate() {
        let w = col?;
        for (slot, i) in (0..n).filter(|&i| i != j).enumerate() {
            coefficients[[i, j]] = w[slot];
        }
    }
    Ok(RidgeSelfRepresentation {
        coefficients,
        ridge_lambda,
    })
}

/// `(G_{-j,-j} + lambda I, G_{-j,j})`.
pub fn reduced_system(gram: &Array2<f64>, j: usize, ridge_lambda: f64) -> (Array2<f64>, Vec<f64>) {
    let n = gram.nrows();
    let keep: Vec<usize> = (0..n).filter(|&i| i != j).collect();
    let mut system = Array2::<f64>::zeros((n - 1, n - 1));
    for (a, &i) in keep.iter().enumerate() {
        for (b, &k) in keep.iter().enumerate() {
            system[[a, b]] = gram[[i, k]];
        }
        system[[a, a]] += ridge_lambda;
    }
    let rhs = keep.iter().map(|&i| gram[[i, j]]).collect();
    (system, rhs)
}

/// Ranks bands by `alpha_i = sum_j |W[i, j]|`.
pub fn issc_rank(x: &Array2<f64>, ridge_lambda: f64) -> Result<BandRanking> {
    let rep = ridge_self_representation(x, ridge_lambda)?;
    Ok(BandRanking::from_weights(
        rep.coefficients
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum())
            .collect(),
    ))
}

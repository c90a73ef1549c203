use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hsi::BandList;
use crate::operational::forward::{padded_powers, sample_coefficients};
use crate::operational::OperationalLayerParams;

/// Per-band weights and the band indices sorted by weight, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct BandRanking {
    pub alpha: Vec<f64>,
    pub order: Vec<usize>,
}

impl BandRanking {
    /// Sorts bands by descending weight; ties go to the lower band index.
    pub fn from_weights(alpha: Vec<f64>) -> Self {
        let mut order: Vec<usize> = (0..alpha.len()).collect();
        order.sort_by(|&a, &b| alpha[b].total_cmp(&alpha[a]).then(a.cmp(&b)));
        Self { alpha, order }
    }

    pub fn bands(&self) -> usize {
        self.alpha.len()
    }
}

/// `(1/t) sum_i |A_i|` over all rows of `xt`, computed `chunk` samples at a
/// time. Accumulation always runs in sample order, so the result does not
/// depend on `chunk` or on the thread count.
pub fn mean_abs_representation(
    params: &OperationalLayerParams,
    xt: &Array2<f64>,
    chunk: usize,
) -> Result<Array2<f64>> {
    let (t, n) = xt.dim();
    params.check_input(n)?;
    if t == 0 {
        return Err(Error::shape("cannot rank bands from an empty sample matrix"));
    }
    if chunk == 0 {
        return Err(Error::config("chunk size must be positive"));
    }
    let mut acc = vec![0.0; n * n];
    let mut start = 0;
    while start < t {
        let end = (start + chunk).min(t);
        let mats: Vec<Vec<f64>> = (start..end)
            .into_par_iter()
            .map_init(Vec::new, |powers, i| {
                padded_powers(xt.row(i), params.order(), params.filter_size(), powers);
                let mut a = vec![0.0; n * n];
                sample_coefficients(params, powers, n, &mut a);
                a
            })
            .collect();
        for a in &mats {
            for (s, v) in acc.iter_mut().zip(a) {
                *s += v.abs();
            }
        }
        start = end;
    }
    let inv = 1.0 / t as f64;
    Ok(Array2::from_shape_vec((n, n), acc.into_iter().map(|v| v * inv).collect())
        .expect("n*n buffer"))
}

/// Band weights `alpha_k = sum_j A[k, j]` (row sums of the mean absolute
/// coefficient matrix over the whole sample set).
pub fn rank_bands(
    params: &OperationalLayerParams,
    xt: &Array2<f64>,
    chunk: usize,
) -> Result<BandRanking> {
    let a = mean_abs_representation(params, xt, chunk)?;
    Ok(BandRanking::from_weights(a.rows().into_iter().map(|r| r.sum()).collect()))
}

/// The `k` highest-ranked bands, sorted ascending.
pub fn select_top_k(ranking: &BandRanking, k: usize) -> Result<BandList> {
    if k == 0 {
        return Err(Error::config("k must be positive"));
    }
    if k > ranking.bands() {
        return Err(Error::KTooLarge {
            k,
            max: ranking.bands(),
        });
    }
    Ok(BandList::new(ranking.order[..k].to_vec()))
}

/// `band_index,alpha,rank` rows in rank order (rank 1 = most important).
pub fn ranking_csv(ranking: &BandRanking) -> String {
    let mut out = String::from("band_index,alpha,rank\n");
    for (r, &b) in ranking.order.iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", b, ranking.alpha[b], r + 1));
    }
    out
}

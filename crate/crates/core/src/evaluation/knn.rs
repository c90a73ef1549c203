use ndarray::{Array2, ArrayView1};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_KNN_K: usize = 5;

fn distance(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Euclidean k-nearest-neighbour majority vote.
///
/// Neighbours at equal distance are taken in training order. A tied vote goes
/// to the class with the smallest summed neighbour distance, then to the
/// smallest class id. When `k` exceeds the training set every training point
/// votes.
pub fn knn_classify(
    train_x: &Array2<f64>,
    train_y: &[u16],
    test_x: &Array2<f64>,
    k: usize,
) -> Result<Vec<u16>> {
    if train_x.nrows() == 0 {
        return Err(Error::EmptyTrainSet);
    }
    if k == 0 || k.is_multiple_of(2) {
        return Err(Error::config(format!("k must be a positive odd integer, got {k}")));
    }
    if train_y.len() != train_x.nrows() {
        return Err(Error::shape(format!(
            "{} training rows but {} labels",
            train_x.nrows(),
            train_y.len()
        )));
    }
    if test_x.ncols() != train_x.ncols() {
        return Err(Error::shape(format!(
            "train has {} features, test has {}",
            train_x.ncols(),
            test_x.ncols()
        )));
    }
    let k = k.min(train_x.nrows());
    let predictions = (0..test_x.nrows())
        .into_par_iter()
        .map(|t| {
            let query = test_x.row(t);
            let mut dists: Vec<(f64, usize)> = train_x
                .rows()
                .into_iter()
                .enumerate()
                .map(|(i, row)| (distance(query, row), i))
                .collect();
            dists.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            vote(&dists[..k], train_y)
        })
        .collect();
    Ok(predictions)
}

fn vote(neighbours: &[(f64, usize)], train_y: &[u16]) -> u16 {
    // (class, votes, summed distance)
    let mut tally: Vec<(u16, usize, f64)> = Vec::new();
    for &(d, i) in neighbours {
        let c = train_y[i];
        match tally.iter_mut().find(|e| e.0 == c) {
            Some(e) => {
                e.1 += 1;
                e.2 += d;
            }
            None => tally.push((c, 1, d)),
        }
    }
    tally
        .into_iter()
        .min_by(|a, b| b.1.cmp(&a.1).then(a.2.total_cmp(&b.2)).then(a.0.cmp(&b.0)))
        .map(|e| e.0)
        .expect("at least one neighbour")
}

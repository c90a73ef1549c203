//! PCA feature extraction and the ridge self-representation band ranker on a
//! planted-band cube.

use srl_soa::baselines::{issc_rank, pca_fit, pca_project, ridge_self_representation, DEFAULT_RIDGE_LAMBDA};
use srl_soa::hsi::{flatten_pixels, normalize};
use srl_soa::synthetic::{planted_mixture, PlantedSpec};

fn main() {
    let planted = planted_mixture(&PlantedSpec::default()).unwrap();
    let x = flatten_pixels(&normalize(&planted.cube));
    let (m, n) = x.dim();
    println!("{m} pixels x {n} bands, planted sources {:?}", planted.planted);

    let model = pca_fit(&x, 5).unwrap();
    let full = pca_fit(&x, n).unwrap();
    let total = full.explained_variance.sum();
    for (i, v) in model.explained_variance.iter().enumerate() {
        println!("PC{}: variance {v:.5} ({:.1}%)", i + 1, 100.0 * v / total);
    }
    let z = pca_project(&model, &x).unwrap();
    println!("projected features: {:?}", z.dim());

    let rep = ridge_self_representation(&x, DEFAULT_RIDGE_LAMBDA).unwrap();
    let b = planted.planted[0];
    let strongest = (0..n)
        .max_by(|&i, &j| rep.coefficients[[i, b]].abs().total_cmp(&rep.coefficients[[j, b]].abs()))
        .unwrap();
    println!("band {b} is best explained by band {strongest}");

    let ranking = issc_rank(&x, DEFAULT_RIDGE_LAMBDA).unwrap();
    println!("ridge ranking, top 5: {:?}", &ranking.order[..5]);
}

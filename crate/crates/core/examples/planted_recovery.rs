//! Where do the planted source bands land in each ranking?
//!
//! `cargo run --release --example planted_recovery -- [seeds]`

use srl_soa::baselines::{issc_rank, DEFAULT_RIDGE_LAMBDA};
use srl_soa::hsi::{flatten_pixels, normalize};
use srl_soa::synthetic::{planted_mixture, PlantedSpec};
use srl_soa::trainer::{rank_bands, train, BandRanking, TrainConfig};

fn positions(ranking: &BandRanking, planted: &[usize]) -> Vec<usize> {
    planted
        .iter()
        .map(|b| ranking.order.iter().position(|o| o == b).unwrap())
        .collect()
}

fn main() {
    let seeds: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(3);
    for seed in 0..seeds {
        let planted = planted_mixture(&PlantedSpec {
            seed,
            ..PlantedSpec::default()
        })
        .unwrap();
        let x = flatten_pixels(&normalize(&planted.cube));
        let params = train(
            &x,
            &TrainConfig {
                seed,
                ..TrainConfig::default()
            },
        )
        .unwrap()
        .params;
        let soa = rank_bands(&params, &x, 256).unwrap();
        let ridge = issc_rank(&x, DEFAULT_RIDGE_LAMBDA).unwrap();
        println!(
            "seed {seed}: planted {:?}  operational ranks {:?}  ridge ranks {:?}",
            planted.planted,
            positions(&soa, &planted.planted),
            positions(&ridge, &planted.planted)
        );
    }
}

//! Compares band selectors by kNN classification on a labelled synthetic
//! scene and prints the sweep table.
//!
//! `cargo run --release --example evaluate_sweep -- [seeds]`

use srl_soa::evaluation::{sweep, ExperimentConfig, Method};
use srl_soa::synthetic::{planted_scene, PlantedSpec};
use srl_soa::trainer::TrainConfig;

fn main() {
    let seeds: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(3);
    let scene = planted_scene(
        &PlantedSpec {
            height: 20,
            width: 20,
            bands: 40,
            noise_sigma: 0.2,
            seed: 1,
            ..PlantedSpec::default()
        },
        6,
        0.02,
    )
    .unwrap();
    println!("class-bearing bands: {:?}", scene.planted.planted);

    let config = ExperimentConfig {
        train: TrainConfig {
            epochs: 10,
            ..TrainConfig::default()
        },
        train_fraction: 0.3,
        ..ExperimentConfig::default()
    };
    let seeds: Vec<u64> = (0..seeds).collect();
    let result = sweep(
        &scene.planted.cube,
        &scene.labels,
        &Method::ALL,
        &[3, 5, 10],
        &seeds,
        &config,
    )
    .unwrap();
    print!("{}", result.to_csv());
    println!("first run: {}", result.runs_jsonl().lines().next().unwrap());
}

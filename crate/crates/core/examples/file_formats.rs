//! Writes and reads every binary artifact: cube, label map, trained
//! parameters and a PCA model.

use std::fs;

use srl_soa::baselines::{load_pca, pca_fit, save_pca};
use srl_soa::hsi::{flatten_pixels, load_cube, load_labels, save_cube, save_labels, CUBE_HEADER_LEN};
use srl_soa::operational::{load_params, save_params};
use srl_soa::synthetic::{planted_scene, PlantedSpec};
use srl_soa::trainer::{init_params, TrainConfig};

fn main() {
    let dir = std::env::temp_dir().join("srlsoa-formats-example");
    fs::create_dir_all(&dir).unwrap();
    let scene = planted_scene(
        &PlantedSpec {
            height: 6,
            width: 5,
            bands: 12,
            ..PlantedSpec::default()
        },
        3,
        0.05,
    )
    .unwrap();

    let cube = dir.join("scene.hsic");
    save_cube(&scene.planted.cube, &cube).unwrap();
    assert_eq!(load_cube(&cube).unwrap(), scene.planted.cube);
    println!("cube: {} bytes ({CUBE_HEADER_LEN}-byte header + 6*5*12 f32)", fs::metadata(&cube).unwrap().len());

    let labels = dir.join("scene.hsil");
    save_labels(&scene.labels, &labels).unwrap();
    assert_eq!(load_labels(&labels).unwrap(), scene.labels);
    println!("labels: {} bytes", fs::metadata(&labels).unwrap().len());

    let params = init_params(12, &TrainConfig { filter_size: 5, ..TrainConfig::default() }).unwrap();
    let path = dir.join("params.soap");
    save_params(&params, &path).unwrap();
    assert_eq!(load_params(&path).unwrap(), params);
    println!("params: {} bytes for {} values", fs::metadata(&path).unwrap().len(), params.param_count());

    let model = pca_fit(&flatten_pixels(&scene.planted.cube), 4).unwrap();
    let path = dir.join("model.pcam");
    save_pca(&model, &path).unwrap();
    assert_eq!(load_pca(&path).unwrap(), model);
    println!("pca model: {} bytes", fs::metadata(&path).unwrap().len());

    let mut broken = fs::read(&cube).unwrap();
    broken.truncate(broken.len() - 3);
    fs::write(&cube, broken).unwrap();
    println!("truncated cube: {}", load_cube(&cube).unwrap_err());
}

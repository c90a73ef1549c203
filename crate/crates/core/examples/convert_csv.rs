//! Converts CSV spectra and labels into the binary cube and label formats
//! through the command-line front end, then reads them back.

use std::fs;

use srl_soa::cli::run_from;
use srl_soa::hsi::{load_cube, load_labels};

fn main() {
    let dir = std::env::temp_dir().join("srlsoa-convert-example");
    fs::create_dir_all(&dir).unwrap();

    // A 2x3 image with 4 bands: one row per pixel, one column per band.
    let mut csv = String::new();
    for p in 0..6 {
        let row: Vec<String> = (0..4).map(|b| format!("{}", 0.1 * (p * 4 + b) as f64)).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    let spectra = dir.join("spectra.csv");
    fs::write(&spectra, csv).unwrap();
    let labels = dir.join("labels.csv");
    fs::write(&labels, "1,1,0\n2,2,0\n").unwrap();

    let cube_path = dir.join("scene.hsic");
    let label_path = dir.join("scene.hsil");
    let s = |p: &std::path::Path| p.to_str().unwrap().to_string();
    assert_eq!(
        run_from(["srlsoa", "convert", "--input", &s(&spectra), "--dims", "2x3x4", "--output", &s(&cube_path)]),
        0
    );
    assert_eq!(
        run_from([
            "srlsoa", "convert", "--kind", "labels", "--input", &s(&labels), "--dims", "2x3", "--output",
            &s(&label_path),
        ]),
        0
    );

    let cube = load_cube(&cube_path).unwrap();
    let map = load_labels(&label_path).unwrap();
    println!(
        "cube {}x{}x{} ({} bytes), band 2 = {:?}",
        cube.height(),
        cube.width(),
        cube.bands(),
        fs::metadata(&cube_path).unwrap().len(),
        cube.band(2)
    );
    println!("labels {:?}, {} classes, annotated pixels {:?}", map.labels(), map.class_count(), map.annotated());

    // Wrong dims are a data error (exit code 3).
    let code = run_from(["srlsoa", "convert", "--input", &s(&spectra), "--dims", "2x3x5", "--output", &s(&cube_path)]);
    println!("mismatched dims exit code: {code}");
}

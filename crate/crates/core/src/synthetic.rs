//! Synthetic cubes with a known answer.
//!
//! In a planted-band cube a few source bands carry independent per-pixel
//! signals and every other band is a convex mix of the sources plus Gaussian
//! noise, so the sources are the best possible small band subset. A planted
//! scene adds class labels that depend on the source bands alone.

use ndarray::Array2;
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::hsi::{HsiCube, LabelMap};
use crate::rng::{stream, Stream};

#[derive(Debug, Clone)]
pub struct PlantedCube {
    pub cube: HsiCube,
    /// Source band indices, ascending.
    pub planted: Vec<usize>,
    /// `bands x sources` mixing weights (identity rows for the sources).
    pub mixing: Array2<f64>,
}

#[derive(Debug, Clone)]
pub struct PlantedSpec {
    pub height: usize,
    pub width: usize,
    pub bands: usize,
    pub sources: usize,
    /// Standard deviation of the noise added to every mixed band, relative to
    /// the `[0, 1]` range of the noise-free mix.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for PlantedSpec {
    fn default() -> Self {
        Self {
            height: 32,
            width: 32,
            bands: 40,
            sources: 3,
            noise_sigma: 0.05,
            seed: 0,
        }
    }
}

fn min_max_scale(col: &mut [f64]) {
    let (lo, hi) = col
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let span = hi - lo;
    for v in col.iter_mut() {
        *v = if span > 0.0 { (*v - lo) / span } else { 0.0 };
    }
}

/// Mixes the given `pixels x sources` signals into a planted cube.
fn mix_sources(
    spec: &PlantedSpec,
    signals: &Array2<f64>,
    rng: &mut impl Rng,
) -> Result<PlantedCube> {
    let m = spec.height * spec.width;
    let mut planted = sample(rng, spec.bands, spec.sources).into_vec();
    planted.sort_unstable();

    let mut mixing = Array2::<f64>::zeros((spec.bands, spec.sources));
    for b in 0..spec.bands {
        if let Some(s) = planted.iter().position(|&p| p == b) {
            mixing[[b, s]] = 1.0;
        } else {
            let raw: Vec<f64> = (0..spec.sources).map(|_| rng.random::<f64>() + 1e-3).collect();
            let total: f64 = raw.iter().sum();
            for (s, w) in raw.into_iter().enumerate() {
                mixing[[b, s]] = w / total;
            }
        }
    }

    let noise = Normal::new(0.0, spec.noise_sigma).expect("sigma is finite");
    let mut pixels = signals.dot(&mixing.t());
    for b in 0..spec.bands {
        let mut col = pixels.column(b).to_vec();
        min_max_scale(&mut col);
        if !planted.contains(&b) {
            for v in col.iter_mut() {
                *v += noise.sample(rng);
            }
        }
        pixels.column_mut(b).assign(&ndarray::Array1::from(col));
    }
    debug_assert_eq!(pixels.nrows(), m);
    let cube = HsiCube::from_pixels(spec.height, spec.width, &pixels)?;
    Ok(PlantedCube {
        cube,
        planted,
        mixing,
    })
}

/// Independent uniform sources per pixel.
pub fn planted_mixture(spec: &PlantedSpec) -> Result<PlantedCube> {
    let mut rng = stream(spec.seed, Stream::Synthetic);
    let m = spec.height * spec.width;
    let signals = Array2::from_shape_fn((m, spec.sources), |_| rng.random::<f64>());
    mix_sources(spec, &signals, &mut rng)
}

#[derive(Debug, Clone)]
pub struct PlantedScene {
    pub planted: PlantedCube,
    pub labels: LabelMap,
}

/// A labelled scene whose classes are separable on the source bands.
///
/// Each class gets a centre in source space; pixels draw their source
/// signals around their class centre with spread `class_sigma`, and the
/// remaining bands are noisy mixes as in [`planted_mixture`]. With a large
/// `noise_sigma` the mixed bands carry little class information. Every pixel
/// is annotated; classes are assigned round-robin over a shuffled order.
pub fn planted_scene(spec: &PlantedSpec, classes: usize, class_sigma: f64) -> Result<PlantedScene> {
    let mut rng = stream(spec.seed, Stream::Synthetic);
    let m = spec.height * spec.width;
    let centres = Array2::from_shape_fn((classes, spec.sources), |_| rng.random::<f64>());
    let spread = Normal::new(0.0, class_sigma).expect("sigma is finite");
    let mut assignment: Vec<usize> = (0..m).map(|p| p % classes).collect();
    assignment.shuffle(&mut rng);
    let signals = Array2::from_shape_fn((m, spec.sources), |(p, s)| {
        centres[[assignment[p], s]] + spread.sample(&mut rng)
    });
    let planted = mix_sources(spec, &signals, &mut rng)?;
    let labels = LabelMap::new(
        spec.height,
        spec.width,
        assignment.iter().map(|&c| c as u16 + 1).collect(),
    )?;
    Ok(PlantedScene { planted, labels })
}

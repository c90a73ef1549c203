//! Pixel classification on selected bands and the OA / AA / kappa metrics.
//!
//! Classification uses a Euclidean kNN vote on per-pixel spectra.

mod knn;
mod metrics;

pub use knn::{knn_classify, DEFAULT_KNN_K};
pub use metrics::{compute_metrics, ConfusionMatrix, Metrics};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::seq::index::sample;
use serde::Serialize;

use crate::baselines::{issc_rank, pca_fit, pca_project, DEFAULT_RIDGE_LAMBDA};
use crate::error::{Error, Result};
use crate::hsi::{
    flatten_pixels, normalize, remove_bands, sample_split, select_bands, select_rows, BandList,
    DatasetPreset, HsiCube, LabelMap, SplitIndices,
};
use crate::rng::{stream, Stream};
use crate::trainer::{rank_bands, select_top_k, train, BandRanking, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SrlSoa,
    Issc,
    Pca,
    Random,
    AllBands,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::SrlSoa,
        Method::Issc,
        Method::Pca,
        Method::Random,
        Method::AllBands,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::SrlSoa => "srl_soa",
            Method::Issc => "issc",
            Method::Pca => "pca",
            Method::Random => "random",
            Method::AllBands => "all_bands",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::config(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub train: TrainConfig,
    /// Zero-based bands removed after normalisation.
    pub drop_bands: BandList,
    pub train_fraction: f64,
    /// Also feed unannotated pixels to the selector fit.
    pub include_unlabeled: bool,
    pub knn_k: usize,
    pub ridge_lambda: f64,
    /// Samples per ranking chunk.
    pub chunk: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            train: TrainConfig::default(),
            drop_bands: BandList::default(),
            train_fraction: 0.05,
            include_unlabeled: false,
            knn_k: DEFAULT_KNN_K,
            ridge_lambda: DEFAULT_RIDGE_LAMBDA,
            chunk: 256,
        }
    }
}

impl ExperimentConfig {
    pub fn for_preset(preset: DatasetPreset) -> Self {
        Self {
            drop_bands: preset.water_bands(),
            train_fraction: preset.train_fraction(),
            include_unlabeled: preset.include_unlabeled_in_fit(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub method: Method,
    pub k_bands: usize,
    pub seed: u64,
    pub oa: f64,
    pub aa: f64,
    pub kappa: f64,
    pub per_class_accuracy: Vec<Option<f64>>,
    /// Zero-based bands after water-band removal; empty for PCA.
    pub selected_bands: Vec<usize>,
}

/// Normalised, band-reduced pixels with the split for one seed.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub pixels: Array2<f64>,
    pub labels: Vec<u16>,
    pub classes: usize,
    pub split: SplitIndices,
    /// Rows the selector is fitted on.
    pub fit_rows: Vec<usize>,
}

impl PreparedData {
    pub fn bands(&self) -> usize {
        self.pixels.ncols()
    }
}

pub fn prepare(
    cube: &HsiCube,
    labels: &LabelMap,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<PreparedData> {
    labels.check_matches(cube)?;
    let reduced = remove_bands(&normalize(cube), &config.drop_bands)?;
    let pixels = flatten_pixels(&reduced);
    let split = sample_split(labels, config.train_fraction, seed)?;
    let mut fit_rows = split.train.clone();
    if config.include_unlabeled {
        fit_rows.extend(labels.unannotated());
        fit_rows.sort_unstable();
    }
    Ok(PreparedData {
        pixels,
        labels: labels.labels().to_vec(),
        classes: labels.class_count(),
        split,
        fit_rows,
    })
}

/// Full band ranking for the ranking methods; `None` for the others.
pub fn fit_ranking(
    method: Method,
    data: &PreparedData,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<Option<BandRanking>> {
    let fit = || select_rows(&data.pixels, &data.fit_rows);
    match method {
        Method::SrlSoa => {
            let xt = fit();
            let train_config = TrainConfig {
                seed,
                ..config.train.clone()
            };
            let outcome = train(&xt, &train_config)?;
            Ok(Some(rank_bands(&outcome.params, &xt, config.chunk)?))
        }
        Method::Issc => Ok(Some(issc_rank(&fit(), config.ridge_lambda)?)),
        Method::Pca | Method::Random | Method::AllBands => Ok(None),
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::config("k_bands must be positive"));
    }
    if k > n {
        return Err(Error::KTooLarge { k, max: n });
    }
    Ok(())
}

/// Classifies the test pixels on the features chosen by `method`.
///
/// Whenever `k_bands` equals the band count every method reduces to the
/// full spectrum, so the report matches `all_bands`.
pub fn evaluate_selection(
    method: Method,
    k_bands: usize,
    data: &PreparedData,
    ranking: Option<&BandRanking>,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<EvalReport> {
    let n = data.bands();
    let all = || BandList::new((0..n).collect());
    let (train_x, test_x, selected) = if method == Method::AllBands {
        let b = all();
        (
            select_rows(&data.pixels, &data.split.train),
            select_rows(&data.pixels, &data.split.test),
            b,
        )
    } else {
        check_k(k_bands, n)?;
        if method == Method::Pca && k_bands < n {
            let model = pca_fit(&select_rows(&data.pixels, &data.fit_rows), k_bands)?;
            (
                pca_project(&model, &select_rows(&data.pixels, &data.split.train))?,
                pca_project(&model, &select_rows(&data.pixels, &data.split.test))?,
                BandList::default(),
            )
        } else {
            let bands = if k_bands == n {
                all()
            } else {
                match method {
                    Method::Random => {
                        let mut rng = stream(seed, Stream::RandomBands);
                        BandList::new(sample(&mut rng, n, k_bands).into_vec())
                    }
                    _ => {
                        let ranking = ranking.ok_or_else(|| {
                            Error::config(format!("{method} needs a fitted ranking"))
                        })?;
                        select_top_k(ranking, k_bands)?
                    }
                }
            };
            let x = select_bands(&data.pixels, &bands);
            (
                select_rows(&x, &data.split.train),
                select_rows(&x, &data.split.test),
                bands,
            )
        }
    };

    let pick = |rows: &[usize]| rows.iter().map(|&r| data.labels[r]).collect::<Vec<u16>>();
    let predicted = knn_classify(&train_x, &pick(&data.split.train), &test_x, config.knn_k)?;
    let conf = ConfusionMatrix::from_predictions(&pick(&data.split.test), &predicted, data.classes)?;
    let metrics = compute_metrics(&conf)?;
    Ok(EvalReport {
        method,
        k_bands: if method == Method::AllBands { n } else { k_bands },
        seed,
        oa: metrics.oa,
        aa: metrics.aa,
        kappa: metrics.kappa,
        per_class_accuracy: metrics.per_class_accuracy,
        selected_bands: selected.indices().to_vec(),
    })
}

/// Normalise, drop bands, split, fit the selector on the training pixels,
/// select `k_bands` bands (or components) and score a kNN classifier on the
/// test pixels.
pub fn run_experiment(
    cube: &HsiCube,
    labels: &LabelMap,
    method: Method,
    k_bands: usize,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<EvalReport> {
    let data = prepare(cube, labels, config, seed)?;
    let ranking = if method == Method::AllBands || k_bands == data.bands() {
        None
    } else {
        fit_ranking(method, &data, config, seed)?
    };
    evaluate_selection(method, k_bands, &data, ranking.as_ref(), config, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub method: Method,
    pub k_bands: usize,
    pub seed_count: usize,
    pub oa_mean: f64,
    pub oa_std: f64,
    pub aa_mean: f64,
    pub aa_std: f64,
    pub kappa_mean: f64,
    pub kappa_std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub runs: Vec<EvalReport>,
}

/// Mean and sample standard deviation (zero for a single value).
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Every `(method, k)` pair averaged over `seeds`. Rankings are fitted once
/// per `(method, seed)` and reused across `k_list`.
pub fn sweep(
    cube: &HsiCube,
    labels: &LabelMap,
    methods: &[Method],
    k_list: &[usize],
    seeds: &[u64],
    config: &ExperimentConfig,
) -> Result<SweepResult> {
    if methods.is_empty() || k_list.is_empty() || seeds.is_empty() {
        return Err(Error::config("methods, k list and seeds must be nonempty"));
    }
    let mut runs = Vec::new();
    let mut by_cell: HashMap<(Method, usize), Vec<EvalReport>> = HashMap::new();
    for &seed in seeds {
        let data = prepare(cube, labels, config, seed)?;
        for &method in methods {
            let needs_ranking = method != Method::AllBands && k_list.iter().any(|&k| k != data.bands());
            let ranking = if needs_ranking {
                fit_ranking(method, &data, config, seed)?
            } else {
                None
            };
            for &k in k_list {
                let report = evaluate_selection(method, k, &data, ranking.as_ref(), config, seed)?;
                by_cell.entry((method, k)).or_default().push(report.clone());
                runs.push(report);
            }
        }
    }
    let mut rows = Vec::new();
    for &method in methods {
        for &k in k_list {
            let reports = &by_cell[&(method, k)];
            let col = |f: fn(&EvalReport) -> f64| mean_std(&reports.iter().map(f).collect::<Vec<_>>());
            let (oa_mean, oa_std) = col(|r| r.oa);
            let (aa_mean, aa_std) = col(|r| r.aa);
            let (kappa_mean, kappa_std) = col(|r| r.kappa);
            rows.push(SweepRow {
                method,
                k_bands: k,
                seed_count: reports.len(),
                oa_mean,
                oa_std,
                aa_mean,
                aa_std,
                kappa_mean,
                kappa_std,
            });
        }
    }
    Ok(SweepResult { rows, runs })
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "method,k_bands,seed_count,oa_mean,oa_std,aa_mean,aa_std,kappa_mean,kappa_std\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.method, r.k_bands, r.seed_count, r.oa_mean, r.oa_std, r.aa_mean, r.aa_std,
                r.kappa_mean, r.kappa_std
            ));
        }
        out
    }

    /// One JSON object per run, including the selected bands.
    pub fn runs_jsonl(&self) -> String {
        self.runs
            .iter()
            .map(|r| serde_json::to_string(r).expect("reports serialise") + "\n")
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{planted_scene, PlantedSpec};

    fn tiny_scene() -> (HsiCube, LabelMap) {
        let spec = PlantedSpec {
            height: 12,
            width: 12,
            bands: 16,
            seed: 2,
            ..PlantedSpec::default()
        };
        let s = planted_scene(&spec, 4, 0.03).unwrap();
        (s.planted.cube, s.labels)
    }

    fn quick_config() -> ExperimentConfig {
        ExperimentConfig {
            train: TrainConfig {
                epochs: 2,
                filter_size: 3,
                ..TrainConfig::default()
            },
            train_fraction: 0.3,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("svm".parse::<Method>().is_err());
        assert_eq!(serde_json::to_string(&Method::AllBands).unwrap(), "\"all_bands\"");
    }

    #[test]
    fn all_bands_ignores_k() {
        let (cube, labels) = tiny_scene();
        let cfg = quick_config();
        let a = run_experiment(&cube, &labels, Method::AllBands, 1, &cfg, 0).unwrap();
        let b = run_experiment(&cube, &labels, Method::AllBands, 7, &cfg, 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.k_bands, 16);
    }

    #[test]
    fn full_selection_equals_all_bands() {
        let (cube, labels) = tiny_scene();
        let cfg = quick_config();
        let all = run_experiment(&cube, &labels, Method::AllBands, 16, &cfg, 1).unwrap();
        for m in [Method::SrlSoa, Method::Issc, Method::Pca, Method::Random] {
            let r = run_experiment(&cube, &labels, m, 16, &cfg, 1).unwrap();
            assert_eq!(
                (r.oa, r.aa, r.kappa, &r.selected_bands),
                (all.oa, all.aa, all.kappa, &all.selected_bands)
            );
        }
    }

    #[test]
    fn random_bands_vary_with_seed() {
        let (cube, labels) = tiny_scene();
        let cfg = quick_config();
        let bands = |seed| {
            run_experiment(&cube, &labels, Method::Random, 4, &cfg, seed)
                .unwrap()
                .selected_bands
        };
        assert!((0..5).any(|s| bands(2 * s) != bands(2 * s + 1)));
        assert_eq!(bands(3), bands(3));
    }

    #[test]
    fn deterministic_reports() {
        let (cube, labels) = tiny_scene();
        let cfg = quick_config();
        for m in Method::ALL {
            let a = run_experiment(&cube, &labels, m, 3, &cfg, 5).unwrap();
            let b = run_experiment(&cube, &labels, m, 3, &cfg, 5).unwrap();
            assert_eq!(a, b);
            assert!((0.0..=1.0).contains(&a.oa) && (0.0..=1.0).contains(&a.aa));
            assert!(a.kappa <= 1.0);
        }
    }

    #[test]
    fn sweep_shape_and_csv() {
        let (cube, labels) = tiny_scene();
        let cfg = quick_config();
        let result = sweep(&cube, &labels, &[Method::Random, Method::AllBands], &[2, 4, 16], &[0, 1, 2], &cfg).unwrap();
        assert_eq!(result.rows.len(), 6);
        assert_eq!(result.runs.len(), 18);
        let csv = result.to_csv();
        assert!(csv.starts_with("method,k_bands,seed_count,oa_mean,oa_std"));
        assert_eq!(csv.lines().count(), 7);
        let full_random = &result.rows[2];
        let full_all = &result.rows[5];
        assert_eq!(full_random.oa_mean, full_all.oa_mean);
        assert!(result.rows.iter().all(|r| r.seed_count == 3));
        let line = result.runs_jsonl().lines().next().unwrap().to_string();
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["method"], "random");
        assert_eq!(v["selected_bands"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn bad_k() {
        let (cube, labels) = tiny_scene();
        let cfg = quick_config();
        assert!(matches!(
            run_experiment(&cube, &labels, Method::Issc, 17, &cfg, 0),
            Err(Error::KTooLarge { k: 17, max: 16 })
        ));
        assert!(run_experiment(&cube, &labels, Method::Random, 0, &cfg, 0).is_err());
        assert!(sweep(&cube, &labels, &[], &[1], &[0], &cfg).is_err());
    }
}

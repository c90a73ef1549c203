//! Command-line front end: `convert`, `train`, `rank`, `evaluate` and
//! `gradcheck`.
//!
//! Exit codes: 0 success, 1 failed check, 2 usage or configuration error,
//! 3 data error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array2;
use rand::Rng;

use crate::binio::write_atomic;
use crate::error::{Error, Result};
use crate::evaluation::{prepare, sweep, ExperimentConfig, Method};
use crate::hsi::{
    flatten_pixels, load_cube, load_labels, normalize, remove_bands, save_cube, save_labels,
    select_rows, BandList, DatasetPreset, HsiCube, LabelMap,
};
use crate::operational::{encoder_forward, grad_check_with, load_params, save_params, OperationalLayerParams};
use crate::rng::{stream, Stream};
use crate::trainer::{loss_history_csv, rank_bands, ranking_csv, parse_key_values, train};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "srlsoa", version, about = "Hyperspectral band selection with a sparse operational autoencoder")]
pub struct Cli {
    /// Worker threads (1 gives a fully sequential run).
    #[arg(long, global = true, env = "SRLSOA_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a CSV of pixel spectra (or labels) to the binary format.
    Convert(ConvertArgs),
    /// Train the autoencoder and write params, loss history and ranking.
    Train(TrainArgs),
    /// Re-rank bands from a saved params file.
    Rank(RankArgs),
    /// Sweep methods, band counts and seeds; write summary CSV and run log.
    Evaluate(EvaluateArgs),
    /// Compare analytic gradients with central finite differences.
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvertKind {
    Cube,
    Labels,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// `HxWxB` for cubes, `HxW` for labels.
    #[arg(long)]
    pub dims: String,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = ConvertKind::Cube)]
    pub kind: ConvertKind,
}

/// Data and preprocessing options shared by `train`, `rank` and `evaluate`.
#[derive(Debug, Args, Clone, Default)]
pub struct DataArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// `key = value` file; command-line flags win over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `indian_pines` or `salinas_a`: water bands, train fraction, unlabeled use.
    #[arg(long)]
    pub preset: Option<String>,
    /// One-based bands to drop, e.g. `104-108,150-163`.
    #[arg(long)]
    pub drop_bands: Option<String>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long)]
    pub include_unlabeled: bool,
    #[arg(long)]
    pub chunk: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct TrainFlags {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub fs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub train: TrainFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub train: TrainFlags,
    /// Comma-separated methods.
    #[arg(long, default_value = "srl_soa,issc,pca,random,all_bands")]
    pub method: String,
    /// Comma-separated band counts.
    #[arg(long, default_value = "5,10,15,20,25")]
    pub k: String,
    /// Seeds as a list with ranges, e.g. `0-9` or `1,4,7`.
    #[arg(long, default_value = "0-9")]
    pub seeds: String,
    #[arg(long)]
    pub knn_k: Option<usize>,
    #[arg(long)]
    pub ridge_lambda: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    /// Number of random instances.
    #[arg(long, default_value_t = 100)]
    pub configs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fix the order instead of drawing from {1, 3, 5}.
    #[arg(long)]
    pub q: Option<usize>,
    /// Fix the filter size instead of drawing from {3, 5, 7}.
    #[arg(long)]
    pub fs: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub step: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tolerance: f64,
    #[arg(long, hide = true)]
    pub corrupt_gradient: bool,
}

/// Maps an error to its exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BadConfig(_) | Error::KTooLarge { .. } | Error::BadKernelSize { .. } => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.threads {
        Some(0) => Err(Error::config("--threads must be positive")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config(format!("thread pool: {e}")))?
            .install(|| dispatch(cli.command)),
        None => dispatch(cli.command),
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Convert(a) => cmd_convert(&a).map(|()| EXIT_OK),
        Command::Train(a) => {
            let out = cmd_train(&a)?;
            println!("wrote {}", out.display());
            Ok(EXIT_OK)
        }
        Command::Rank(a) => {
            let out = cmd_rank(&a)?;
            println!("wrote {}", out.display());
            Ok(EXIT_OK)
        }
        Command::Evaluate(a) => {
            let out = cmd_evaluate(&a)?;
            println!("wrote {}", out.display());
            Ok(EXIT_OK)
        }
        Command::Gradcheck(a) => {
            let (err, pass) = cmd_gradcheck(&a)?;
            println!("gradcheck max_rel_err={err:e} {}", if pass { "PASS" } else { "FAIL" });
            Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    }
}

fn parse_dims(text: &str) -> Result<Vec<usize>> {
    text.split(['x', 'X'])
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad dims {text:?}")))
        })
        .collect()
}

fn parse_csv_rows(text: &str) -> Result<Vec<Vec<String>>> {
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(|c| c.trim().to_string()).collect())
        .collect())
}

/// Cube CSV: one pixel per row (row-major pixel order), one band per column.
/// Label CSV: one value per pixel, in any row/column layout.
pub fn cmd_convert(args: &ConvertArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(args.input.clone()),
        _ => Error::Io(e),
    })?;
    let rows = parse_csv_rows(&text)?;
    let dims = parse_dims(&args.dims)?;
    match args.kind {
        ConvertKind::Cube => {
            let [h, w, b] = dims[..] else {
                return Err(Error::Parse(format!("cube dims must be HxWxB, got {:?}", args.dims)));
            };
            if rows.len() != h * w || rows.iter().any(|r| r.len() != b) {
                return Err(Error::DimMismatch(format!(
                    "{h}x{w}x{b} needs {} rows of {b} values",
                    h * w
                )));
            }
            let mut values = vec![0f32; h * w * b];
            for (p, row) in rows.iter().enumerate() {
                for (band, cell) in row.iter().enumerate() {
                    let v: f32 = cell
                        .parse()
                        .map_err(|_| Error::Parse(format!("row {}: bad number {cell:?}", p + 1)))?;
                    values[band * h * w + p] = v;
                }
            }
            save_cube(&HsiCube::new(h, w, b, values)?, &args.output)
        }
        ConvertKind::Labels => {
            let [h, w] = dims[..] else {
                return Err(Error::Parse(format!("label dims must be HxW, got {:?}", args.dims)));
            };
            let labels = rows
                .iter()
                .flatten()
                .map(|c| {
                    c.parse::<u16>()
                        .map_err(|_| Error::Parse(format!("bad label {c:?}")))
                })
                .collect::<Result<Vec<u16>>>()?;
            if labels.len() != h * w {
                return Err(Error::DimMismatch(format!(
                    "{h}x{w} needs {} labels, found {}",
                    h * w,
                    labels.len()
                )));
            }
            save_labels(&LabelMap::new(h, w, labels)?, &args.output)
        }
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::Parse(format!("bad boolean {other:?} for {key}"))),
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad value {value:?} for {key}")))
}

/// Experiment settings after applying, in order: preset, config file, flags.
pub fn resolve_config(data: &DataArgs, flags: &TrainFlags) -> Result<ExperimentConfig> {
    let text = match &data.config {
        Some(path) => Some(fs::read_to_string(path).map_err(|_| Error::MissingFile(path.clone()))?),
        None => None,
    };
    let pairs = match &text {
        Some(t) => parse_key_values(t)?,
        None => Vec::new(),
    };
    let preset = match &data.preset {
        Some(name) => Some(name.clone()),
        None => pairs.iter().find(|(k, _)| k == "preset").map(|(_, v)| v.clone()),
    };
    let mut cfg = match preset {
        Some(name) => ExperimentConfig::for_preset(DatasetPreset::parse(&name)?),
        None => ExperimentConfig::default(),
    };

    for (key, value) in &pairs {
        if cfg.train.apply(key, value)? {
            continue;
        }
        match key.as_str() {
            "preset" => {}
            "drop_bands" => cfg.drop_bands = BandList::parse_one_based(value)?,
            "train_fraction" => cfg.train_fraction = parse_value(key, value)?,
            "include_unlabeled" => cfg.include_unlabeled = parse_bool(key, value)?,
            "knn_k" => cfg.knn_k = parse_value(key, value)?,
            "ridge_lambda" => cfg.ridge_lambda = parse_value(key, value)?,
            "chunk" => cfg.chunk = parse_value(key, value)?,
            other => return Err(Error::config(format!("unknown config key {other:?}"))),
        }
    }

    if let Some(text) = &data.drop_bands {
        cfg.drop_bands = BandList::parse_one_based(text)?;
    }
    if let Some(f) = data.train_fraction {
        cfg.train_fraction = f;
    }
    if data.include_unlabeled {
        cfg.include_unlabeled = true;
    }
    if let Some(c) = data.chunk {
        cfg.chunk = c;
    }
    if let Some(s) = data.seed {
        cfg.train.seed = s;
    }
    let t = &mut cfg.train;
    if let Some(v) = flags.lambda {
        t.lambda = v;
    }
    if let Some(v) = flags.q {
        t.order_q = v;
    }
    if let Some(v) = flags.fs {
        t.filter_size = v;
    }
    if let Some(v) = flags.lr {
        t.learning_rate = v;
    }
    if let Some(v) = flags.epochs {
        t.epochs = v;
    }
    if let Some(v) = flags.batch {
        t.batch_size = v;
    }

    cfg.train.validate()?;
    if !(cfg.train_fraction > 0.0 && cfg.train_fraction <= 1.0) {
        return Err(Error::config("train fraction must be in (0, 1]"));
    }
    if cfg.chunk == 0 {
        return Err(Error::config("chunk must be positive"));
    }
    if cfg.knn_k == 0 || cfg.knn_k % 2 == 0 {
        return Err(Error::config("knn k must be a positive odd integer"));
    }
    if !(cfg.ridge_lambda > 0.0) {
        return Err(Error::config("ridge lambda must be positive"));
    }
    Ok(cfg)
}

fn output_dir(out: &Option<PathBuf>) -> Result<PathBuf> {
    let dir = match out {
        Some(p) => p.clone(),
        None => {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            Path::new("out").join(format!("run-{secs}"))
        }
    };
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Pixels the selector is fitted on: the training split (plus unlabeled
/// pixels if configured) when labels are given, otherwise every pixel.
fn fit_matrix(data: &DataArgs, cfg: &ExperimentConfig) -> Result<Array2<f64>> {
    let cube = load_cube(&data.data)?;
    match &data.labels {
        Some(path) => {
            let labels = load_labels(path)?;
            let prepared = prepare(&cube, &labels, cfg, cfg.train.seed)?;
            Ok(select_rows(&prepared.pixels, &prepared.fit_rows))
        }
        None => Ok(flatten_pixels(&remove_bands(&normalize(&cube), &cfg.drop_bands)?)),
    }
}

/// Writes `params.soap`, `loss.csv` and `ranking.csv`; returns the directory.
pub fn cmd_train(args: &TrainArgs) -> Result<PathBuf> {
    let cfg = resolve_config(&args.data, &args.train)?;
    let xt = fit_matrix(&args.data, &cfg)?;
    let dir = output_dir(&args.out)?;
    let outcome = train(&xt, &cfg.train)?;
    let ranking = rank_bands(&outcome.params, &xt, cfg.chunk)?;
    save_params(&outcome.params, dir.join("params.soap"))?;
    write_atomic(&dir.join("loss.csv"), loss_history_csv(&outcome.history).as_bytes())?;
    write_atomic(&dir.join("ranking.csv"), ranking_csv(&ranking).as_bytes())?;
    Ok(dir)
}

/// Writes `ranking.csv` from saved params; returns the directory.
pub fn cmd_rank(args: &RankArgs) -> Result<PathBuf> {
    let cfg = resolve_config(&args.data, &TrainFlags::default())?;
    let params = load_params(&args.params)?;
    let xt = fit_matrix(&args.data, &cfg)?;
    let dir = output_dir(&args.out)?;
    let ranking = rank_bands(&params, &xt, cfg.chunk)?;
    write_atomic(&dir.join("ranking.csv"), ranking_csv(&ranking).as_bytes())?;
    Ok(dir)
}

fn parse_list<T: std::str::FromStr>(what: &str, text: &str) -> Result<Vec<T>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::config(format!("bad {what} entry {s:?}")))
        })
        .collect()
}

/// `0-9`, `1,4,7` or a mix.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (parse_value("seeds", a)?, parse_value("seeds", b)?);
                if a > b {
                    return Err(Error::config(format!("empty seed range {part:?}")));
                }
                seeds.extend(a..=b);
            }
            None => seeds.push(parse_value("seeds", part)?),
        }
    }
    Ok(seeds)
}

/// Writes `sweep.csv` and `runs.jsonl`; returns the directory.
pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<PathBuf> {
    let mut cfg = resolve_config(&args.data, &args.train)?;
    if let Some(k) = args.knn_k {
        if k == 0 || k % 2 == 0 {
            return Err(Error::config("knn k must be a positive odd integer"));
        }
        cfg.knn_k = k;
    }
    if let Some(r) = args.ridge_lambda {
        cfg.ridge_lambda = r;
    }
    let methods: Vec<Method> = parse_list("method", &args.method)?;
    let ks: Vec<usize> = parse_list("k", &args.k)?;
    let seeds = parse_seeds(&args.seeds)?;
    let labels_path = args
        .data
        .labels
        .as_ref()
        .ok_or_else(|| Error::config("evaluate needs --labels"))?;
    let labels = load_labels(labels_path)?;
    let cube = load_cube(&args.data.data)?;
    let result = sweep(&cube, &labels, &methods, &ks, &seeds, &cfg)?;
    let dir = output_dir(&args.out)?;
    write_atomic(&dir.join("sweep.csv"), result.to_csv().as_bytes())?;
    write_atomic(&dir.join("runs.jsonl"), result.runs_jsonl().as_bytes())?;
    Ok(dir)
}

/// Draws a random instance (N <= 16, Q in {1, 3, 5}, f_s in {3, 5, 7},
/// m in {1, 2, 5}) on which the loss is smooth within `step` of the
/// parameters.
///
/// With inputs in `[0, 1]` a parameter move of `step` shifts every
/// coefficient by at most `step`, so instances whose off-diagonal `|A|`
/// entries all exceed `10 * step` keep the l1 term away from its kink; other
/// draws are rejected.
pub fn gradcheck_instance(
    rng: &mut crate::rng::Prng,
    q: Option<usize>,
    fs: Option<usize>,
    step: f64,
) -> Result<(OperationalLayerParams, Array2<f64>)> {
    loop {
        let q = q.unwrap_or([1, 3, 5][rng.random_range(0..3)]);
        let fs = fs.unwrap_or([3, 5, 7][rng.random_range(0..3)]);
        let n = rng.random_range(fs.max(2)..=16.max(fs));
        let m = [1, 2, 5][rng.random_range(0..3)];
        let weights = (0..n * q * fs).map(|_| rng.random_range(-0.5..0.5)).collect();
        let biases = (0..n * q).map(|_| rng.random_range(-0.2..0.2)).collect();
        let params = OperationalLayerParams::from_parts(n, q, fs, weights, biases)?;
        let xs = Array2::from_shape_fn((m, n), |_| rng.random::<f64>());
        if min_offdiagonal_abs(&xs, &params)? > 10.0 * step {
            return Ok((params, xs));
        }
    }
}

fn min_offdiagonal_abs(xs: &Array2<f64>, params: &OperationalLayerParams) -> Result<f64> {
    let rep = encoder_forward(xs, params)?;
    let mut least = f64::INFINITY;
    for a in rep.per_sample.outer_iter() {
        for ((k, j), v) in a.indexed_iter() {
            if k != j {
                least = least.min(v.abs());
            }
        }
    }
    Ok(least)
}

/// Worst relative error over random small instances and whether it is within
/// tolerance.
pub fn cmd_gradcheck(args: &GradcheckArgs) -> Result<(f64, bool)> {
    if args.configs == 0 {
        return Err(Error::config("--configs must be positive"));
    }
    let mut rng = stream(args.seed, Stream::GradCheck);
    let mut worst = 0.0f64;
    for _ in 0..args.configs {
        let (params, xs) = gradcheck_instance(&mut rng, args.q, args.fs, args.step)?;
        let corrupt = args.corrupt_gradient;
        let err = grad_check_with(&params, &xs, args.lambda, args.step, |g| {
            if corrupt {
                g.d_weights[0] += 1.0;
            }
        })?;
        worst = worst.max(err);
    }
    Ok((worst, worst <= args.tolerance))
}

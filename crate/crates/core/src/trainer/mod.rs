//! Parameter initialisation, the mini-batch ADAM loop and band ranking.

mod adam;
mod config;
mod ranking;

pub use adam::{adam_step, AdamState};
pub use config::{parse_key_values, InitScale, TrainConfig};
pub use ranking::{
    mean_abs_representation, rank_bands, ranking_csv, select_top_k, BandRanking,
};

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hsi::select_rows;
use crate::operational::{backward, OperationalLayerParams};
use crate::rng::{stream, Stream};

/// Weights uniform on `[-s, s]` (see [`InitScale`]), biases zero.
pub fn init_params(n_bands: usize, config: &TrainConfig) -> Result<OperationalLayerParams> {
    config.validate()?;
    if n_bands < config.filter_size {
        return Err(Error::config(format!(
            "filter size {} exceeds the {n_bands} bands",
            config.filter_size
        )));
    }
    let (q, fs) = (config.order_q, config.filter_size);
    let scale = match config.init_scale_mode {
        InitScale::FanAvgUniform => (6.0 / (q * fs + fs) as f64).sqrt(),
    };
    let mut rng = stream(config.seed, Stream::Init);
    let weights = (0..n_bands * q * fs)
        .map(|_| rng.random_range(-scale..=scale))
        .collect();
    OperationalLayerParams::from_parts(n_bands, q, fs, weights, vec![0.0; n_bands * q])
}

/// Loss of one update step, evaluated before the update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossRecord {
    pub epoch: usize,
    pub batch: usize,
    pub loss: f64,
    pub fidelity: f64,
    pub regularizer: f64,
}

/// What a training observer sees at every step, before the update is applied.
pub struct StepView<'a> {
    pub record: LossRecord,
    pub batch: &'a Array2<f64>,
    pub params: &'a OperationalLayerParams,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: OperationalLayerParams,
    pub history: Vec<LossRecord>,
}

/// Trains from freshly initialised parameters.
pub fn train(xt: &Array2<f64>, config: &TrainConfig) -> Result<TrainOutcome> {
    train_with(xt, config, |_| {})
}

/// [`train`] with a per-step observer.
///
/// Each epoch reshuffles the sample order and walks it in consecutive
/// batches of `batch_size`; a final short batch is kept.
pub fn train_with(
    xt: &Array2<f64>,
    config: &TrainConfig,
    mut observe: impl FnMut(&StepView<'_>),
) -> Result<TrainOutcome> {
    config.validate()?;
    let (m, n) = xt.dim();
    if m < config.batch_size {
        return Err(Error::config(format!(
            "{m} training samples is fewer than the batch size {}",
            config.batch_size
        )));
    }
    let mut params = init_params(n, config)?;
    let mut state = AdamState::new(&params);
    let mut rng = stream(config.seed, Stream::Shuffle);
    let mut order: Vec<usize> = (0..m).collect();
    let mut history = Vec::with_capacity(config.epochs * m.div_ceil(config.batch_size));

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        for (batch_no, rows) in order.chunks(config.batch_size).enumerate() {
            let batch = select_rows(xt, rows);
            let (parts, grads) = backward(&batch, &params, config.lambda)?;
            if !parts.total.is_finite() || !grads.is_finite() {
                return Err(Error::NonFiniteLoss {
                    epoch,
                    batch: batch_no,
                });
            }
            let record = LossRecord {
                epoch,
                batch: batch_no,
                loss: parts.total,
                fidelity: parts.fidelity,
                regularizer: parts.regularizer,
            };
            observe(&StepView {
                record,
                batch: &batch,
                params: &params,
            });
            history.push(record);
            adam_step(&mut params, &grads, &mut state, config)?;
        }
    }
    Ok(TrainOutcome { params, history })
}

/// `epoch,batch,loss,fidelity,regularizer` with a header row.
pub fn loss_history_csv(history: &[LossRecord]) -> String {
    let mut out = String::from("epoch,batch,loss,fidelity,regularizer\n");
    for r in history {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.epoch, r.batch, r.loss, r.fidelity, r.regularizer
        ));
    }
    out
}

/// Mean total loss per epoch, in epoch order.
pub fn epoch_mean_loss(history: &[LossRecord]) -> Vec<f64> {
    let mut sums: Vec<(f64, usize)> = Vec::new();
    for r in history {
        if sums.len() <= r.epoch {
            sums.resize(r.epoch + 1, (0.0, 0));
        }
        sums[r.epoch].0 += r.loss;
        sums[r.epoch].1 += 1;
    }
    sums.into_iter().map(|(s, c)| s / c.max(1) as f64).collect()
}

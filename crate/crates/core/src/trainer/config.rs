use std::str::FromStr;

use crate::error::{Error, Result};

/// How initial weights are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitScale {
    /// Uniform on `[-s, s]`, `s = sqrt(6 / (fan_in + fan_out))` with
    /// `fan_in = Q * f_s` and `fan_out = f_s`.
    #[default]
    FanAvgUniform,
}

/// Hyperparameters of the SOA training loop.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub lambda: f64,
    pub order_q: usize,
    /// Not fixed by the method; 11 is this crate's choice.
    pub filter_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub init_scale_mode: InitScale,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lambda: 0.01,
            order_q: 3,
            filter_size: 11,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            epochs: 50,
            batch_size: 5,
            seed: 0,
            init_scale_mode: InitScale::FanAvgUniform,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad value {value:?} for {key}")))
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::config(msg));
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be finite and >= 0");
        }
        if self.order_q == 0 {
            return bad("order q must be positive");
        }
        if self.filter_size == 0 || self.filter_size.is_multiple_of(2) {
            return bad("filter size must be odd and positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("adam betas must lie in [0, 1)");
        }
        if !(self.epsilon > 0.0) {
            return bad("adam epsilon must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch size must be positive");
        }
        Ok(())
    }

    /// Sets one field from a `key=value` pair. Returns `Ok(false)` for keys
    /// this config does not own.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<bool> {
        match key {
            "lambda" => self.lambda = parse(key, value)?,
            "q" | "order_q" => self.order_q = parse(key, value)?,
            "fs" | "filter_size" => self.filter_size = parse(key, value)?,
            "lr" | "learning_rate" => self.learning_rate = parse(key, value)?,
            "beta1" => self.beta1 = parse(key, value)?,
            "beta2" => self.beta2 = parse(key, value)?,
            "epsilon" => self.epsilon = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "batch" | "batch_size" => self.batch_size = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "init_scale_mode" => match value.trim() {
                "fan_avg_uniform" => self.init_scale_mode = InitScale::FanAvgUniform,
                other => return Err(Error::Parse(format!("unknown init_scale_mode {other:?}"))),
            },
            _ => return Ok(false),
        }
        Ok(true)
    }
}

/// Parses flat `key = value` text. `#` starts a comment; blank lines are skipped.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

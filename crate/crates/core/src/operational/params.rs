use std::path::Path;

use crate::binio::{read_file, write_atomic, ByteReader};
use crate::error::{Error, Result};

pub const PARAMS_MAGIC: [u8; 4] = *b"SOAP";

/// Trainable tensors of one operational layer with `filters == bands`.
///
/// `weights` is `filters x order x filter_size`, filter-major; slot `q` holds
/// the coefficients applied to the input raised to the power `q + 1`.
/// `biases` is `filters x order`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperationalLayerParams {
    filters: usize,
    order: usize,
    filter_size: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl OperationalLayerParams {
    pub fn zeros(filters: usize, order: usize, filter_size: usize) -> Result<Self> {
        Self::from_parts(
            filters,
            order,
            filter_size,
            vec![0.0; filters * order * filter_size],
            vec![0.0; filters * order],
        )
    }

    pub fn from_parts(
        filters: usize,
        order: usize,
        filter_size: usize,
        weights: Vec<f64>,
        biases: Vec<f64>,
    ) -> Result<Self> {
        if filters == 0 || order == 0 {
            return Err(Error::config("filter count and order must be positive"));
        }
        if filter_size.is_multiple_of(2) || filter_size > filters {
            return Err(Error::BadKernelSize {
                size: filter_size,
                len: filters,
            });
        }
        if weights.len() != filters * order * filter_size || biases.len() != filters * order {
            return Err(Error::shape(format!(
                "expected {} weights and {} biases, got {} and {}",
                filters * order * filter_size,
                filters * order,
                weights.len(),
                biases.len()
            )));
        }
        if weights.iter().chain(&biases).any(|v| !v.is_finite()) {
            return Err(Error::config("parameters must be finite"));
        }
        Ok(Self {
            filters,
            order,
            filter_size,
            weights,
            biases,
        })
    }

    pub fn filters(&self) -> usize {
        self.filters
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn filter_size(&self) -> usize {
        self.filter_size
    }

    pub fn weight_index(&self, k: usize, q: usize, j: usize) -> usize {
        (k * self.order + q) * self.filter_size + j
    }

    /// Kernel applied to `x^(q+1)` by filter `k`.
    pub fn kernel(&self, k: usize, q: usize) -> &[f64] {
        let start = self.weight_index(k, q, 0);
        &self.weights[start..start + self.filter_size]
    }

    pub fn bias(&self, k: usize, q: usize) -> f64 {
        self.biases[k * self.order + q]
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.biases.len()
    }

    /// Flat view: weights then biases.
    pub(crate) fn get_flat(&self, i: usize) -> f64 {
        if i < self.weights.len() {
            self.weights[i]
        } else {
            self.biases[i - self.weights.len()]
        }
    }

    pub(crate) fn set_flat(&mut self, i: usize, v: f64) {
        let nw = self.weights.len();
        if i < nw {
            self.weights[i] = v;
        } else {
            self.biases[i - nw] = v;
        }
    }

    pub(crate) fn check_input(&self, bands: usize) -> Result<()> {
        if bands != self.filters {
            return Err(Error::shape(format!(
                "layer has {} filters but input has {bands} bands",
                self.filters
            )));
        }
        Ok(())
    }
}

/// Gradients shaped like [`OperationalLayerParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub d_weights: Vec<f64>,
    pub d_biases: Vec<f64>,
}

impl Gradients {
    pub fn zeros_like(p: &OperationalLayerParams) -> Self {
        Self {
            d_weights: vec![0.0; p.weights.len()],
            d_biases: vec![0.0; p.biases.len()],
        }
    }

    pub(crate) fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.d_weights.iter_mut().zip(&other.d_weights) {
            *a += b;
        }
        for (a, b) in self.d_biases.iter_mut().zip(&other.d_biases) {
            *a += b;
        }
    }

    pub(crate) fn get_flat(&self, i: usize) -> f64 {
        if i < self.d_weights.len() {
            self.d_weights[i]
        } else {
            self.d_biases[i - self.d_weights.len()]
        }
    }

    pub fn is_finite(&self) -> bool {
        self.d_weights.iter().chain(&self.d_biases).all(|v| v.is_finite())
    }
}

/// `SOAP | u8 1 | u32 N | u32 Q | u32 f_s | f64 weights | f64 biases`, little-endian.
pub fn encode_params(p: &OperationalLayerParams) -> Vec<u8> {
    let mut out = Vec::with_capacity(17 + 8 * p.param_count());
    out.extend_from_slice(&PARAMS_MAGIC);
    out.push(1);
    for d in [p.filters, p.order, p.filter_size] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in p.weights.iter().chain(&p.biases) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_params(bytes: &[u8]) -> Result<OperationalLayerParams> {
    let mut r = ByteReader::new(bytes);
    r.header(&PARAMS_MAGIC, 1)?;
    let n = r.u32()? as usize;
    let q = r.u32()? as usize;
    let fs = r.u32()? as usize;
    r.expect_exact(n * q * fs + n * q, 8)?;
    let weights = r.f64s(n * q * fs)?;
    let biases = r.f64s(n * q)?;
    OperationalLayerParams::from_parts(n, q, fs, weights, biases)
}

pub fn save_params(p: &OperationalLayerParams, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &encode_params(p))
}

pub fn load_params(path: impl AsRef<Path>) -> Result<OperationalLayerParams> {
    decode_params(&read_file(path.as_ref())?)
}

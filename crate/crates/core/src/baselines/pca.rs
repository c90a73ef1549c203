use std::path::Path;

use ndarray::{Array1, Array2, Axis};

use super::linalg::jacobi_eigen;
use crate::binio::{read_file, write_atomic, ByteReader};
use crate::error::{Error, Result};

pub const PCA_MAGIC: [u8; 4] = *b"PCAM";

/// Principal axes fitted on a training matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Array1<f64>,
    /// `k x N`, orthonormal rows.
    pub components: Array2<f64>,
    /// Descending, non-negative.
    pub explained_variance: Array1<f64>,
}

impl PcaModel {
    pub fn k(&self) -> usize {
        self.components.nrows()
    }

    pub fn features(&self) -> usize {
        self.mean.len()
    }
}

/// Sample covariance (divisor `M - 1`) of the rows of `x`.
pub fn covariance(x: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let m = x.nrows();
    let mean = x.mean_axis(Axis(0)).expect("non-empty");
    let centred = x - &mean;
    let cov = centred.t().dot(&centred) / (m as f64 - 1.0);
    (mean, cov)
}

/// Top-`k` principal components by Jacobi eigendecomposition of the
/// covariance. Each component is signed so its largest-magnitude entry is
/// positive.
pub fn pca_fit(x: &Array2<f64>, k: usize) -> Result<PcaModel> {
    let (m, n) = x.dim();
    if m < 2 {
        return Err(Error::DegenerateData("PCA needs at least two samples".into()));
    }
    if k == 0 {
        return Err(Error::config("k must be positive"));
    }
    if k > m.min(n) {
        return Err(Error::KTooLarge { k, max: m.min(n) });
    }
    let (mean, cov) = covariance(x);
    if cov.diag().sum() <= 0.0 {
        return Err(Error::DegenerateData("zero covariance".into()));
    }
    let (values, vectors) = jacobi_eigen(&cov);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let mut components = Array2::<f64>::zeros((k, n));
    let mut explained_variance = Array1::<f64>::zeros(k);
    for (row, &i) in idx.iter().take(k).enumerate() {
        let mut v = vectors.column(i).to_owned();
        let pivot = v
            .iter()
            .copied()
            .fold(0.0f64, |best, e| if e.abs() > best.abs() { e } else { best });
        if pivot < 0.0 {
            v.mapv_inplace(|e| -e);
        }
        components.row_mut(row).assign(&v);
        explained_variance[row] = values[i].max(0.0);
    }
    Ok(PcaModel {
        mean,
        components,
        explained_variance,
    })
}

/// `(X - mean) . components^T`.
pub fn pca_project(model: &PcaModel, x: &Array2<f64>) -> Result<Array2<f64>> {
    if x.ncols() != model.features() {
        return Err(Error::shape(format!(
            "model has {} features, data has {}",
            model.features(),
            x.ncols()
        )));
    }
    Ok((x - &model.mean).dot(&model.components.t()))
}

/// `PCAM | u8 1 | u32 N | u32 k | f64 mean[N] | f64 components[k*N] | f64 variance[k]`.
pub fn encode_pca(model: &PcaModel) -> Vec<u8> {
    let (n, k) = (model.features(), model.k());
    let mut out = Vec::with_capacity(13 + 8 * (n + k * n + k));
    out.extend_from_slice(&PCA_MAGIC);
    out.push(1);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(k as u32).to_le_bytes());
    for v in model
        .mean
        .iter()
        .chain(model.components.iter())
        .chain(model.explained_variance.iter())
    {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_pca(bytes: &[u8]) -> Result<PcaModel> {
    let mut r = ByteReader::new(bytes);
    r.header(&PCA_MAGIC, 1)?;
    let n = r.u32()? as usize;
    let k = r.u32()? as usize;
    r.expect_exact(n + k * n + k, 8)?;
    let mean = Array1::from(r.f64s(n)?);
    let components = Array2::from_shape_vec((k, n), r.f64s(k * n)?)
        .map_err(|e| Error::shape(e.to_string()))?;
    let explained_variance = Array1::from(r.f64s(k)?);
    Ok(PcaModel {
        mean,
        components,
        explained_variance,
    })
}

pub fn save_pca(model: &PcaModel, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &encode_pca(model))
}

pub fn load_pca(path: impl AsRef<Path>) -> Result<PcaModel> {
    decode_pca(&read_file(path.as_ref())?)
}

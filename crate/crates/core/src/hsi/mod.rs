//! Hyperspectral cubes, label maps, band lists and the preprocessing steps
//! applied before any band selector sees the data.

mod format;
mod split;

pub use format::{
    decode_cube, decode_labels, encode_cube, encode_labels, load_cube, load_labels, save_cube,
    save_labels, CUBE_HEADER_LEN, CUBE_MAGIC, LABEL_HEADER_LEN, LABEL_MAGIC,
};
pub use split::{sample_split, SplitIndices};

use ndarray::Array2;

use crate::error::{Error, Result};

/// A `height x width x bands` reflectance cube stored band-sequentially:
/// all pixels of band 0, then all pixels of band 1, and so on. Pixels within
/// a band are row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HsiCube {
    height: usize,
    width: usize,
    bands: usize,
    values: Vec<f32>,
}

impl HsiCube {
    pub fn new(height: usize, width: usize, bands: usize, values: Vec<f32>) -> Result<Self> {
        if height == 0 || width == 0 || bands == 0 {
            return Err(Error::DimMismatch(format!(
                "cube dimensions must be positive, got {height}x{width}x{bands}"
            )));
        }
        let expected = height * width * bands;
        if values.len() != expected {
            return Err(Error::DimMismatch(format!(
                "{height}x{width}x{bands} cube needs {expected} values, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(i));
        }
        Ok(Self {
            height,
            width,
            bands,
            values,
        })
    }

    /// Builds a cube from an `M x N` pixel matrix (rows row-major over the image).
    pub fn from_pixels(height: usize, width: usize, pixels: &Array2<f64>) -> Result<Self> {
        let (m, n) = pixels.dim();
        if m != height * width {
            return Err(Error::DimMismatch(format!(
                "{m} pixel rows do not fill a {height}x{width} image"
            )));
        }
        let mut values = vec![0f32; m * n];
        for ((p, b), v) in pixels.indexed_iter() {
            values[b * m + p] = *v as f32;
        }
        Self::new(height, width, n, values)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn pixel_count(&self) -> usize {
        self.height * self.width
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn band(&self, b: usize) -> &[f32] {
        let m = self.pixel_count();
        &self.values[b * m..(b + 1) * m]
    }

    pub fn get(&self, row: usize, col: usize, band: usize) -> f32 {
        self.values[band * self.pixel_count() + row * self.width + col]
    }
}

/// Per-pixel ground truth. 0 marks an unannotated pixel; classes are `1..=C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    height: usize,
    width: usize,
    labels: Vec<u16>,
    classes: usize,
}

impl LabelMap {
    pub fn new(height: usize, width: usize, labels: Vec<u16>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::DimMismatch("label map dimensions must be positive".into()));
        }
        if labels.len() != height * width {
            return Err(Error::DimMismatch(format!(
                "{height}x{width} label map needs {} labels, got {}",
                height * width,
                labels.len()
            )));
        }
        let max = labels.iter().copied().max().unwrap_or(0) as usize;
        let mut seen = vec![false; max + 1];
        for &l in &labels {
            seen[l as usize] = true;
        }
        if let Some(missing) = (1..=max).find(|&c| !seen[c]) {
            return Err(Error::BadLabels(format!(
                "class ids are not contiguous: {missing} missing below {max}"
            )));
        }
        Ok(Self {
            height,
            width,
            labels,
            classes: max,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    /// Number of classes `C`.
    pub fn class_count(&self) -> usize {
        self.classes
    }

    /// Flat indices of annotated pixels, ascending.
    pub fn annotated(&self) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.labels[i] != 0).collect()
    }

    /// Flat indices of unannotated pixels, ascending.
    pub fn unannotated(&self) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.labels[i] == 0).collect()
    }

    pub fn check_matches(&self, cube: &HsiCube) -> Result<()> {
        if self.height != cube.height() || self.width != cube.width() {
            return Err(Error::DimMismatch(format!(
                "label map is {}x{}, cube is {}x{}",
                self.height,
                self.width,
                cube.height(),
                cube.width()
            )));
        }
        Ok(())
    }
}

/// Sorted, duplicate-free 0-based band indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BandList(Vec<usize>);

impl BandList {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self(indices)
    }

    /// From 1-based inclusive ranges such as `[(104, 108), (150, 163)]`.
    pub fn from_one_based_ranges(ranges: &[(usize, usize)]) -> Result<Self> {
        let mut out = Vec::new();
        for &(lo, hi) in ranges {
            if lo == 0 || hi < lo {
                return Err(Error::config(format!("bad 1-based band range {lo}-{hi}")));
            }
            out.extend(lo - 1..hi);
        }
        Ok(Self::new(out))
    }

    /// Parses `"104-108,150-163,224"` (1-based, inclusive). Empty string gives
    /// an empty list.
    pub fn parse_one_based(text: &str) -> Result<Self> {
        let mut ranges = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad band index {s:?}")))
            };
            let range = match part.split_once('-') {
                Some((a, b)) => (parse(a)?, parse(b)?),
                None => {
                    let v = parse(part)?;
                    (v, v)
                }
            };
            ranges.push(range);
        }
        Self::from_one_based_ranges(&ranges)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, band: usize) -> bool {
        self.0.binary_search(&band).is_ok()
    }

    pub fn check_bounds(&self, bands: usize) -> Result<()> {
        match self.0.last() {
            Some(&last) if last >= bands => Err(Error::IndexOutOfRange {
                index: last,
                len: bands,
            }),
            _ => Ok(()),
        }
    }
}

/// Water-absorption band lists and split settings for the two AVIRIS scenes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetPreset {
    /// 145 x 145 pixels, 220 bands, 16 classes.
    IndianPines,
    /// 86 x 83 pixels, 224 bands, 6 classes.
    SalinasA,
}

impl DatasetPreset {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().replace(['_', ' '], "-").as_str() {
            "indian-pines" => Ok(Self::IndianPines),
            "salinas-a" => Ok(Self::SalinasA),
            other => Err(Error::config(format!("unknown dataset preset {other:?}"))),
        }
    }

    pub fn water_bands(self) -> BandList {
        let ranges: &[(usize, usize)] = match self {
            Self::IndianPines => &[(104, 108), (150, 163), (220, 220)],
            Self::SalinasA => &[(108, 112), (154, 167), (224, 224)],
        };
        BandList::from_one_based_ranges(ranges).expect("static ranges are valid")
    }

    pub fn train_fraction(self) -> f64 {
        match self {
            Self::IndianPines => 0.05,
            Self::SalinasA => 0.01,
        }
    }

    pub fn include_unlabeled_in_fit(self) -> bool {
        matches!(self, Self::SalinasA)
    }
}

/// Drops the listed bands, keeping the others in order.
pub fn remove_bands(cube: &HsiCube, drop: &BandList) -> Result<HsiCube> {
    drop.check_bounds(cube.bands())?;
    if drop.is_empty() {
        return Ok(cube.clone());
    }
    let m = cube.pixel_count();
    let kept: Vec<usize> = (0..cube.bands()).filter(|b| !drop.contains(*b)).collect();
    if kept.is_empty() {
        return Err(Error::DimMismatch("band removal would leave no bands".into()));
    }
    let mut values = Vec::with_capacity(kept.len() * m);
    for &b in &kept {
        values.extend_from_slice(cube.band(b));
    }
    HsiCube::new(cube.height(), cube.width(), kept.len(), values)
}

/// Per-band min-max scaling to `[0, 1]`. Constant bands become all zeros.
pub fn normalize(cube: &HsiCube) -> HsiCube {
    let m = cube.pixel_count();
    let mut values = Vec::with_capacity(cube.values().len());
    for b in 0..cube.bands() {
        let band = cube.band(b);
        let (lo, hi) = band
            .iter()
            .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let span = hi as f64 - lo as f64;
        if span > 0.0 {
            values.extend(
                band.iter()
                    .map(|&v| ((v as f64 - lo as f64) / span) as f32),
            );
        } else {
            values.extend(std::iter::repeat_n(0.0f32, m));
        }
    }
    HsiCube {
        height: cube.height,
        width: cube.width,
        bands: cube.bands,
        values,
    }
}

/// `M x N` matrix whose row `p` is the spectrum of flat pixel `p = r * width + c`.
pub fn flatten_pixels(cube: &HsiCube) -> Array2<f64> {
    let m = cube.pixel_count();
    let n = cube.bands();
    let mut out = Array2::<f64>::zeros((m, n));
    for b in 0..n {
        for (p, &v) in cube.band(b).iter().enumerate() {
            out[[p, b]] = v as f64;
        }
    }
    out
}

/// Gathers the given rows of a pixel matrix.
pub fn select_rows(x: &Array2<f64>, rows: &[usize]) -> Array2<f64> {
    x.select(ndarray::Axis(0), rows)
}

/// Gathers the given band columns of a pixel matrix.
pub fn select_bands(x: &Array2<f64>, bands: &BandList) -> Array2<f64> {
    x.select(ndarray::Axis(1), bands.indices())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(h: usize, w: usize, b: usize, values: Vec<f32>) -> HsiCube {
        HsiCube::new(h, w, b, values).unwrap()
    }

    #[test]
    fn rejects_wrong_length_and_nan() {
        assert!(matches!(
            HsiCube::new(2, 2, 3, vec![0.0; 11]),
            Err(Error::DimMismatch(_))
        ));
        let mut v = vec![0.0; 4];
        v[2] = f32::NAN;
        assert!(matches!(
            HsiCube::new(1, 2, 2, v),
            Err(Error::NonFiniteValue(2))
        ));
    }

    #[test]
    fn normalize_examples() {
        let c = cube(1, 3, 1, vec![2.0, 4.0, 6.0]);
        assert_eq!(normalize(&c).values(), &[0.0, 0.5, 1.0]);

        let c = cube(1, 2, 1, vec![5.0, 5.0]);
        assert_eq!(normalize(&c).values(), &[0.0, 0.0]);

        let c = cube(1, 2, 2, vec![0.0, 10.0, 1.0, 3.0]);
        assert_eq!(normalize(&c).values(), &[0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn water_band_presets() {
        let ip = DatasetPreset::IndianPines.water_bands();
        assert_eq!(ip.len(), 20);
        assert_eq!(220 - ip.len(), 200);
        assert_eq!(ip.indices()[0], 103);
        let sa = DatasetPreset::SalinasA.water_bands();
        assert_eq!(sa.len(), 20);
        assert_eq!(224 - sa.len(), 204);
        assert_eq!(*sa.indices().last().unwrap(), 223);
        assert_eq!(
            BandList::parse_one_based("108-112, 154-167,224").unwrap(),
            sa
        );
    }

    #[test]
    fn remove_bands_keeps_order() {
        // 1x1 pixel, 4 bands
        let c = cube(1, 1, 4, vec![0.0, 1.0, 2.0, 3.0]);
        let out = remove_bands(&c, &BandList::new(vec![2, 0])).unwrap();
        assert_eq!(out.values(), &[1.0, 3.0]);
        assert_eq!(remove_bands(&c, &BandList::default()).unwrap(), c);
        assert!(matches!(
            remove_bands(&c, &BandList::new(vec![4])),
            Err(Error::IndexOutOfRange { index: 4, len: 4 })
        ));
    }

    #[test]
    fn removing_full_preset_from_full_cube() {
        let c = cube(1, 1, 220, (0..220).map(|v| v as f32).collect());
        let out = remove_bands(&c, &DatasetPreset::IndianPines.water_bands()).unwrap();
        assert_eq!(out.bands(), 200);
        // band 103 (1-based 104) is the first dropped one
        assert_eq!(out.values()[102], 102.0);
        assert_eq!(out.values()[103], 108.0);
    }

    #[test]
    fn flatten_rows_are_pixel_spectra() {
        // 1x2x3: band-major storage
        let c = cube(1, 2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let x = flatten_pixels(&c);
        assert_eq!(x.dim(), (2, 3));
        assert_eq!(x.row(0).to_vec(), vec![1.0, 3.0, 5.0]);
        assert_eq!(x.row(1).to_vec(), vec![2.0, 4.0, 6.0]);
        assert_eq!(HsiCube::from_pixels(1, 2, &x).unwrap(), c);
    }

    #[test]
    fn flatten_matches_indexing() {
        let (h, w, b) = (3, 4, 2);
        let c = cube(h, w, b, (0..h * w * b).map(|v| v as f32 * 0.5).collect());
        let x = flatten_pixels(&c);
        for r in 0..h {
            for col in 0..w {
                for band in 0..b {
                    assert_eq!(x[[r * w + col, band]], c.get(r, col, band) as f64);
                }
            }
        }
    }

    #[test]
    fn salinas_sized_flatten() {
        let c = cube(86, 83, 1, vec![0.0; 86 * 83]);
        assert_eq!(flatten_pixels(&c).dim(), (7138, 1));
    }

    #[test]
    fn label_map_checks_contiguity() {
        assert!(LabelMap::new(1, 3, vec![0, 1, 2]).is_ok());
        assert!(matches!(
            LabelMap::new(1, 3, vec![0, 1, 3]),
            Err(Error::BadLabels(_))
        ));
        let l = LabelMap::new(1, 4, vec![0, 2, 1, 0]).unwrap();
        assert_eq!(l.class_count(), 2);
        assert_eq!(l.annotated(), vec![1, 2]);
        assert_eq!(l.unannotated(), vec![0, 3]);
    }
}

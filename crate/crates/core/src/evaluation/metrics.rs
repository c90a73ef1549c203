use serde::Serialize;

use crate::error::{Error, Result};

/// `classes x classes` counts; rows are true classes, columns predictions.
/// Class id `c` (1-based, as in label maps) lives at index `c - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    classes: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(classes: usize) -> Self {
        Self {
            classes,
            counts: vec![0; classes * classes],
        }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let classes = rows.len();
        if rows.iter().any(|r| r.len() != classes) {
            return Err(Error::shape("confusion matrix must be square"));
        }
        Ok(Self {
            classes,
            counts: rows.concat(),
        })
    }

    pub fn from_predictions(truth: &[u16], predicted: &[u16], classes: usize) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::shape(format!(
                "{} true labels but {} predictions",
                truth.len(),
                predicted.len()
            )));
        }
        let mut conf = Self::new(classes);
        for (&t, &p) in truth.iter().zip(predicted) {
            conf.record(t, p)?;
        }
        Ok(conf)
    }

    pub fn record(&mut self, truth: u16, predicted: u16) -> Result<()> {
        let check = |c: u16| {
            if c == 0 || c as usize > self.classes {
                Err(Error::BadLabels(format!("class {c} outside 1..={}", self.classes)))
            } else {
                Ok(c as usize - 1)
            }
        };
        let (t, p) = (check(truth)?, check(predicted)?);
        self.counts[t * self.classes + p] += 1;
        Ok(())
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.classes + predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn row_sum(&self, c: usize) -> u64 {
        (0..self.classes).map(|j| self.get(c, j)).sum()
    }

    pub fn col_sum(&self, c: usize) -> u64 {
        (0..self.classes).map(|i| self.get(i, c)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub oa: f64,
    pub aa: f64,
    pub kappa: f64,
    /// `None` for classes absent from the evaluated pixels.
    pub per_class_accuracy: Vec<Option<f64>>,
}

/// Overall accuracy, average accuracy over the classes present and Cohen's
/// kappa (zero when chance agreement is one).
pub fn compute_metrics(conf: &ConfusionMatrix) -> Result<Metrics> {
    let total = conf.total();
    if total == 0 {
        return Err(Error::EmptyConfusion);
    }
    let n = total as f64;
    let c = conf.classes();
    let trace: u64 = (0..c).map(|i| conf.get(i, i)).sum();
    let oa = trace as f64 / n;
    let per_class_accuracy: Vec<Option<f64>> = (0..c)
        .map(|i| match conf.row_sum(i) {
            0 => None,
            r => Some(conf.get(i, i) as f64 / r as f64),
        })
        .collect();
    let present: Vec<f64> = per_class_accuracy.iter().flatten().copied().collect();
    let aa = present.iter().sum::<f64>() / present.len() as f64;
    let pe = (0..c)
        .map(|i| conf.row_sum(i) as f64 * conf.col_sum(i) as f64)
        .sum::<f64>()
        / (n * n);
    let kappa = if pe == 1.0 { 0.0 } else { (oa - pe) / (1.0 - pe) };
    Ok(Metrics {
        oa,
        aa,
        kappa,
        per_class_accuracy,
    })
}

use rand::seq::SliceRandom;

use super::LabelMap;
use crate::error::{Error, Result};
use crate::rng::{stream, Stream};

/// Disjoint train/test subsets of the annotated pixels (flat indices, ascending).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Simple random split of annotated pixels.
///
/// `round(fraction * annotated)` pixels (at least one) are drawn without
/// replacement. Afterwards every class with at least two annotated pixels that
/// is missing from `train` gets its lowest-index pixel swapped in, replacing
/// the highest-index train member of the class that currently has the most
/// train pixels. A rescue is skipped when that donor class has a single train
/// pixel, since the swap would only orphan another class.
pub fn sample_split(labels: &LabelMap, fraction: f64, seed: u64) -> Result<SplitIndices> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::config(format!(
            "train fraction must be in (0, 1], got {fraction}"
        )));
    }
    let annotated = labels.annotated();
    if annotated.is_empty() {
        return Err(Error::EmptyAnnotation);
    }
    let n_train = ((fraction * annotated.len() as f64).round() as usize).clamp(1, annotated.len());

    let mut shuffled = annotated.clone();
    shuffled.shuffle(&mut stream(seed, Stream::Split));
    let mut train = shuffled[..n_train].to_vec();
    train.sort_unstable();

    let y = labels.labels();
    let classes = labels.class_count();
    let mut annotated_count = vec![0usize; classes + 1];
    for &p in &annotated {
        annotated_count[y[p] as usize] += 1;
    }

    let mut train_count = vec![0usize; classes + 1];
    for &p in &train {
        train_count[y[p] as usize] += 1;
    }
    for class in 1..=classes {
        if annotated_count[class] < 2 || train_count[class] > 0 {
            continue;
        }
        // ties go to the smallest class id
        let donor = (1..=classes)
            .max_by_key(|&c| (train_count[c], std::cmp::Reverse(c)))
            .unwrap();
        if train_count[donor] < 2 {
            continue;
        }
        let evict = train
            .iter()
            .rposition(|&p| y[p] as usize == donor)
            .expect("donor has train pixels");
        train.remove(evict);
        let rescued = annotated
            .iter()
            .copied()
            .find(|&p| y[p] as usize == class)
            .expect("class has annotated pixels");
        let at = train.partition_point(|&p| p < rescued);
        train.insert(at, rescued);
        train_count[donor] -= 1;
        train_count[class] += 1;
    }

    let test = annotated
        .into_iter()
        .filter(|p| train.binary_search(p).is_err())
        .collect();
    Ok(SplitIndices { train, test })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map_with_counts(counts: &[usize], unlabeled: usize) -> LabelMap {
        let mut labels = vec![0u16; unlabeled];
        for (c, &n) in counts.iter().enumerate() {
            labels.extend(std::iter::repeat_n(c as u16 + 1, n));
        }
        let len = labels.len();
        LabelMap::new(1, len, labels).unwrap()
    }

    #[test]
    fn sizes_follow_rounding() {
        // 10249 annotated -> 512 at 5 %
        let l = map_with_counts(&[10249], 3);
        let s = sample_split(&l, 0.05, 1).unwrap();
        assert_eq!(s.train.len(), 512);
        assert_eq!(s.test.len(), 10249 - 512);
        // 5348 annotated -> 53 at 1 %
        let l = map_with_counts(&[5348], 0);
        assert_eq!(sample_split(&l, 0.01, 1).unwrap().train.len(), 53);
    }

    #[test]
    fn partition_and_determinism() {
        let l = map_with_counts(&[30, 20, 5, 2], 7);
        let a = sample_split(&l, 0.3, 42).unwrap();
        let b = sample_split(&l, 0.3, 42).unwrap();
        assert_eq!(a, b);
        let mut all: Vec<usize> = a.train.iter().chain(&a.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, l.annotated());
        assert!(a.train.iter().all(|p| l.labels()[*p] != 0));
        assert!(a.train.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rescue_covers_every_class() {
        // tiny fraction: one big class would otherwise take every train slot
        let l = map_with_counts(&[400, 2, 2, 2], 0);
        for seed in 0..20 {
            let s = sample_split(&l, 0.02, seed).unwrap();
            assert_eq!(s.train.len(), 8);
            for class in 1..=4u16 {
                assert!(s.train.iter().any(|&p| l.labels()[p] == class), "seed {seed}");
            }
        }
    }

    #[test]
    fn singleton_classes_are_not_rescued() {
        let l = map_with_counts(&[50, 1], 0);
        let s = sample_split(&l, 0.1, 3).unwrap();
        assert_eq!(s.train.len(), 5);
    }

    #[test]
    fn empty_and_bad_fraction() {
        let l = LabelMap::new(1, 3, vec![0, 0, 0]).unwrap();
        assert!(matches!(sample_split(&l, 0.5, 0), Err(Error::EmptyAnnotation)));
        let l = map_with_counts(&[3], 0);
        assert!(matches!(sample_split(&l, 0.0, 0), Err(Error::BadConfig(_))));
        assert!(matches!(sample_split(&l, 1.5, 0), Err(Error::BadConfig(_))));
    }
}

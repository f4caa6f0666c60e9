use std::ops::Range;

use crate::{Error, Result};

/// One rolling-origin split: train on everything before the test window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    /// 1-based fold number.
    pub index: usize,
    pub train: Range<usize>,
    pub test: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BacktestFolds {
    pub folds: Vec<Fold>,
}

impl BacktestFolds {
    pub fn len(&self) -> usize {
        self.folds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.folds.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Fold> {
        self.folds.iter()
    }

    /// The evaluation tail covered by all test windows.
    pub fn evaluation_range(&self) -> Range<usize> {
        match (self.folds.first(), self.folds.last()) {
            (Some(a), Some(b)) => a.test.start..b.test.end,
            _ => 0..0,
        }
    }
}

/// Expanding-window folds whose test windows tile the last
/// `n_folds * test_len` points.
pub fn rolling_splits(series_length: usize, n_folds: usize, test_len: usize) -> Result<BacktestFolds> {
    if n_folds == 0 || test_len == 0 {
        return Err(Error::Config("n_folds and test_len must be positive".into()));
    }
    let tail = n_folds
        .checked_mul(test_len)
        .ok_or_else(|| Error::Config("fold tail overflows".into()))?;
    if series_length <= tail {
        return Err(Error::TooShort {
            needed: tail + 1,
            actual: series_length,
        });
    }
    let folds = (1..=n_folds)
        .map(|k| {
            let start = series_length - (n_folds - k + 1) * test_len;
            Fold {
                index: k,
                train: 0..start,
                test: start..start + test_len,
            }
        })
        .collect();
    Ok(BacktestFolds { folds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn five_folds_of_ten() {
        let f = rolling_splits(100, 5, 10).unwrap();
        assert_eq!(f.len(), 5);
        assert_eq!((f.folds[0].train.clone(), f.folds[0].test.clone()), (0..50, 50..60));
        assert_eq!((f.folds[4].train.clone(), f.folds[4].test.clone()), (0..90, 90..100));
    }

    #[test]
    fn single_holdout() {
        let f = rolling_splits(30, 1, 10).unwrap();
        assert_eq!(f.folds, vec![Fold { index: 1, train: 0..20, test: 20..30 }]);
    }

    #[test]
    fn no_training_data_for_first_fold() {
        assert!(matches!(rolling_splits(50, 5, 10), Err(Error::TooShort { .. })));
    }

    proptest! {
        #[test]
        fn tests_tile_the_tail(t in 2usize..500, n in 1usize..8, len in 1usize..40) {
            prop_assume!(t > n * len);
            let f = rolling_splits(t, n, len).unwrap();
            prop_assert_eq!(f.evaluation_range(), t - n * len..t);
            for w in f.folds.windows(2) {
                prop_assert_eq!(w[0].test.end, w[1].test.start);
            }
            for fold in &f.folds {
                prop_assert_eq!(fold.train.end, fold.test.start);
                prop_assert_eq!(fold.train.start, 0);
            }
        }
    }
}

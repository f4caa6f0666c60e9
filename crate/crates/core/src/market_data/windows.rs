use crate::{Error, Matrix, Result};

/// Supervised samples for direct multistep forecasting.
///
/// `inputs` is `num_samples x lookback x num_features` flattened row-major;
/// `targets` is `num_samples x horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedDataset {
    pub lookback: usize,
    pub horizon: usize,
    pub num_features: usize,
    /// Column of the source matrix holding the target, when it is one of the
    /// input columns.
    pub target_feature: Option<usize>,
    inputs: Vec<f64>,
    targets: Vec<f64>,
}

impl WindowedDataset {
    pub fn len(&self) -> usize {
        self.targets.len() / self.horizon.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// `lookback x num_features` row-major window of sample `i`.
    pub fn input(&self, i: usize) -> &[f64] {
        let n = self.lookback * self.num_features;
        &self.inputs[i * n..(i + 1) * n]
    }

    pub fn target(&self, i: usize) -> &[f64] {
        &self.targets[i * self.horizon..(i + 1) * self.horizon]
    }

    /// Samples at the given indices, in that order.
    pub fn subset(&self, indices: &[usize]) -> WindowedDataset {
        let mut inputs = Vec::with_capacity(indices.len() * self.lookback * self.num_features);
        let mut targets = Vec::with_capacity(indices.len() * self.horizon);
        for &i in indices {
            inputs.extend_from_slice(self.input(i));
            targets.extend_from_slice(self.target(i));
        }
        WindowedDataset {
            inputs,
            targets,
            ..*self
        }
    }

    /// Copy with every target replaced by `f(target)`.
    pub fn map_targets(&self, f: impl Fn(f64) -> f64) -> WindowedDataset {
        WindowedDataset {
            inputs: self.inputs.clone(),
            targets: self.targets.iter().map(|&t| f(t)).collect(),
            ..*self
        }
    }
}

/// Windows `inputs` (all columns) against a separate target column.
///
/// Sample `i` reads input rows `[i, i + lookback)` and target values
/// `[i + lookback, i + lookback + horizon)`.
pub fn window_columns(
    inputs: &Matrix,
    target: &[f64],
    lookback: usize,
    horizon: usize,
) -> Result<WindowedDataset> {
    let t = inputs.rows();
    if target.len() != t {
        return Err(Error::Dimension(format!(
            "target has {} rows, inputs have {t}",
            target.len()
        )));
    }
    if lookback == 0 || horizon == 0 {
        return Err(Error::Config("lookback and horizon must be positive".into()));
    }
    if t < lookback + horizon {
        return Err(Error::TooShort {
            needed: lookback + horizon,
            actual: t,
        });
    }
    let n = t - lookback - horizon + 1;
    let f = inputs.cols();
    let mut data = Vec::with_capacity(n * lookback * f);
    let mut targets = Vec::with_capacity(n * horizon);
    for i in 0..n {
        data.extend_from_slice(&inputs.as_slice()[i * f..(i + lookback) * f]);
        targets.extend_from_slice(&target[i + lookback..i + lookback + horizon]);
    }
    Ok(WindowedDataset {
        lookback,
        horizon,
        num_features: f,
        target_feature: None,
        inputs: data,
        targets,
    })
}

/// Windows every column of `matrix`, predicting column `target_col`.
pub fn split_sequences(
    matrix: &Matrix,
    lookback: usize,
    horizon: usize,
    target_col: usize,
) -> Result<WindowedDataset> {
    if target_col >= matrix.cols() {
        return Err(Error::Dimension(format!(
            "target column {target_col} out of range for {} columns",
            matrix.cols()
        )));
    }
    let mut ds = window_columns(matrix, &matrix.column(target_col), lookback, horizon)?;
    ds.target_feature = Some(target_col);
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ramp(t: usize, f: usize) -> Matrix {
        let data = (0..t * f).map(|k| k as f64).collect();
        Matrix::from_vec(t, f, data).unwrap()
    }

    #[test]
    fn ten_rows_three_back_two_ahead() {
        let m = ramp(10, 2);
        let ds = split_sequences(&m, 3, 2, 1).unwrap();
        assert_eq!(ds.len(), 6);
        assert_eq!(ds.input(0), &m.as_slice()[0..6]);
        assert_eq!(ds.target(0), &[m.get(3, 1), m.get(4, 1)]);
    }

    #[test]
    fn too_short() {
        assert!(matches!(
            split_sequences(&ramp(5, 1), 3, 3, 0),
            Err(Error::TooShort { needed: 6, actual: 5 })
        ));
    }

    #[test]
    fn thirty_by_thirty_gives_one_sample() {
        let ds = split_sequences(&ramp(60, 4), 30, 30, 3).unwrap();
        assert_eq!(ds.len(), 1);
    }

    #[test]
    fn target_column_checked() {
        assert!(matches!(
            split_sequences(&ramp(10, 2), 3, 2, 2),
            Err(Error::Dimension(_))
        ));
    }

    proptest! {
        #[test]
        fn sample_count_and_contiguity(t in 2usize..80, l in 1usize..20, h in 1usize..20, f in 1usize..4) {
            prop_assume!(t >= l + h);
            let m = ramp(t, f);
            let target = f - 1;
            let ds = split_sequences(&m, l, h, target).unwrap();
            prop_assert_eq!(ds.len(), t - l - h + 1);
            let mut rebuilt: Vec<f64> = (0..l).map(|r| ds.input(0)[r * f + target]).collect();
            rebuilt.extend_from_slice(ds.target(0));
            let expected: Vec<f64> = (0..l + h).map(|r| m.get(r, target)).collect();
            prop_assert_eq!(rebuilt, expected);
        }
    }
}

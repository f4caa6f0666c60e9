use crate::{Error, Matrix, Result};

/// Per-column min/max learned from training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl ScaleParams {
    /// Learns column ranges; rejects constant columns.
    pub fn fit(matrix: &Matrix) -> Result<Self> {
        if matrix.rows() < 2 {
            return Err(Error::TooShort {
                needed: 2,
                actual: matrix.rows(),
            });
        }
        let mut min = vec![f64::INFINITY; matrix.cols()];
        let mut max = vec![f64::NEG_INFINITY; matrix.cols()];
        for i in 0..matrix.rows() {
            for (j, &v) in matrix.row(i).iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("value at row {i}, column {j}")));
                }
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        if let Some(j) = (0..min.len()).find(|&j| max[j] <= min[j]) {
            return Err(Error::ConstantColumn(j));
        }
        Ok(Self { min, max })
    }

    /// Parameters that leave every value unchanged.
    pub fn identity(cols: usize) -> Self {
        Self {
            min: vec![0.0; cols],
            max: vec![1.0; cols],
        }
    }

    pub fn len(&self) -> usize {
        self.min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min.is_empty()
    }

    pub fn scale_value(&self, col: usize, v: f64) -> f64 {
        (v - self.min[col]) / (self.max[col] - self.min[col])
    }

    pub fn unscale_value(&self, col: usize, v: f64) -> f64 {
        v * (self.max[col] - self.min[col]) + self.min[col]
    }

    pub fn transform(&self, matrix: &Matrix) -> Result<Matrix> {
        self.map(matrix, Self::scale_value)
    }

    pub fn inverse_transform(&self, matrix: &Matrix) -> Result<Matrix> {
        self.map(matrix, Self::unscale_value)
    }

    fn map(&self, matrix: &Matrix, f: fn(&Self, usize, f64) -> f64) -> Result<Matrix> {
        if matrix.cols() != self.len() {
            return Err(Error::Dimension(format!(
                "matrix has {} columns, scale covers {}",
                matrix.cols(),
                self.len()
            )));
        }
        let mut out = matrix.clone();
        for i in 0..out.rows() {
            for (j, v) in out.row_mut(i).iter_mut().enumerate() {
                *v = f(self, j, *v);
            }
        }
        Ok(out)
    }
}

/// Min-max scales each column to `[0, 1]`.
pub fn scale_minmax(matrix: &Matrix) -> Result<(Matrix, ScaleParams)> {
    let params = ScaleParams::fit(matrix)?;
    Ok((params.transform(matrix)?, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn affine_map() {
        let m = Matrix::from_columns(&[vec![2.0, 4.0, 6.0]]).unwrap();
        let (s, p) = scale_minmax(&m).unwrap();
        assert_eq!(s.column(0), vec![0.0, 0.5, 1.0]);
        assert_eq!((p.min[0], p.max[0]), (2.0, 6.0));
    }

    #[test]
    fn constant_column_rejected() {
        let m = Matrix::from_columns(&[vec![1.0, 2.0, 3.0], vec![5.0, 5.0, 5.0]]).unwrap();
        assert!(matches!(scale_minmax(&m), Err(Error::ConstantColumn(1))));
    }

    #[test]
    fn single_row_rejected() {
        let m = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(matches!(scale_minmax(&m), Err(Error::TooShort { .. })));
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(values in prop::collection::vec(-1e6f64..1e6, 40)) {
            let m = Matrix::from_vec(10, 4, values).unwrap();
            prop_assume!(ScaleParams::fit(&m).is_ok());
            let (s, p) = scale_minmax(&m).unwrap();
            let back = p.inverse_transform(&s).unwrap();
            let back = back.as_slice();
            for j in 0..4 {
                // relative to the column magnitude: the affine map's rounding is
                // proportional to the span, not to each individual value
                let col_mag = m.column(j).iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
                for i in 0..10 {
                    let (a, b) = (m.get(i, j), back[i * 4 + j]);
                    prop_assert!((a - b).abs() <= 1e-12 * col_mag, "{} vs {}", a, b);
                }
            }
        }
    }
}

//! Ordinary and seasonal differencing and its exact inverse.

use crate::{Error, Result};

/// Values consumed by each differencing pass, in application order.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceState {
    /// Lag of each pass: `b` passes of lag 1 followed by `B` of lag `m`.
    pub lags: Vec<usize>,
    /// The first `lag` values of each pass's input.
    pub heads: Vec<Vec<f64>>,
}

pub(crate) fn lags(b: usize, seasonal_b: usize, m: usize) -> Vec<usize> {
    std::iter::repeat_n(1, b).chain(std::iter::repeat_n(m, seasonal_b)).collect()
}

fn diff_once(x: &[f64], lag: usize) -> Vec<f64> {
    x.iter().skip(lag).zip(x).map(|(a, b)| a - b).collect()
}

/// Apply `(1 − L)^b` then `(1 − L^m)^B`.
pub fn difference(series: &[f64], b: usize, seasonal_b: usize, m: usize) -> Result<(Vec<f64>, DifferenceState)> {
    if seasonal_b > 0 && m == 0 {
        return Err(Error::Config("season length must be ≥ 1 for seasonal differencing".into()));
    }
    let lags = lags(b, seasonal_b, m);
    let consumed: usize = lags.iter().sum();
    if series.len() <= consumed {
        return Err(Error::TooShort {
            needed: consumed + 1,
            actual: series.len(),
        });
    }
    let mut x = series.to_vec();
    let mut heads = Vec::with_capacity(lags.len());
    for &lag in &lags {
        heads.push(x[..lag].to_vec());
        x = diff_once(&x, lag);
    }
    Ok((x, DifferenceState { lags, heads }))
}

/// Exact inverse of [`difference`].
pub fn integrate(differenced: &[f64], state: &DifferenceState) -> Result<Vec<f64>> {
    if state.lags.len() != state.heads.len() || state.lags.iter().zip(&state.heads).any(|(l, h)| *l != h.len()) {
        return Err(Error::Dimension("difference state does not match its lags".into()));
    }
    let mut x = differenced.to_vec();
    for (&lag, head) in state.lags.iter().zip(&state.heads).rev() {
        let mut up = head.clone();
        up.reserve(x.len());
        for (i, w) in x.iter().enumerate() {
            let prev = up[i];
            up.push(w + prev);
        }
        debug_assert_eq!(up.len(), x.len() + lag);
        x = up;
    }
    Ok(x)
}

/// Turn forecasts of the differenced series into level forecasts.
///
/// `tail` holds the last `b + B·m` observed levels.
pub fn integrate_continuation(tail: &[f64], b: usize, seasonal_b: usize, m: usize, forecasts: &[f64]) -> Result<Vec<f64>> {
    let lags = lags(b, seasonal_b, m);
    let consumed: usize = lags.iter().sum();
    if tail.len() < consumed {
        return Err(Error::Dimension(format!(
            "continuation needs {consumed} trailing levels, got {}",
            tail.len()
        )));
    }
    let mut levels = vec![tail[tail.len() - consumed..].to_vec()];
    for &lag in &lags {
        let next = diff_once(levels.last().expect("non-empty"), lag);
        levels.push(next);
    }
    let mut future = forecasts.to_vec();
    for (i, &lag) in lags.iter().enumerate().rev() {
        let mut ext = levels[i].clone();
        let start = ext.len();
        for f in &future {
            let prev = ext[ext.len() - lag];
            ext.push(f + prev);
        }
        future = ext[start..].to_vec();
    }
    Ok(future)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn first_and_seasonal_differences() {
        let (d, s) = difference(&[1.0, 3.0, 6.0], 1, 0, 1).unwrap();
        assert_eq!(d, vec![2.0, 3.0]);
        assert_eq!(s.heads, vec![vec![1.0]]);
        assert_eq!(integrate(&d, &s).unwrap(), vec![1.0, 3.0, 6.0]);
        let (d, _) = difference(&[1.0, 2.0, 4.0, 8.0], 0, 1, 2).unwrap();
        assert_eq!(d, vec![3.0, 6.0]);
        assert!(matches!(difference(&[1.0, 2.0], 0, 1, 2), Err(Error::TooShort { .. })));
    }

    #[test]
    fn zero_forecast_repeats_last_level() {
        let f = integrate_continuation(&[4.0, 9.0], 1, 0, 1, &[0.0; 3]).unwrap();
        assert_eq!(f, vec![9.0; 3]);
    }

    #[test]
    fn continuation_matches_hand_recursion() {
        // b = 1, B = 1, m = 2: y_t = y_{t-1} + y_{t-2} - y_{t-3} + w_t
        let y = [1.0, 4.0, 2.0, 7.0, 5.0];
        let w = [0.5, -1.0, 2.0];
        let got = integrate_continuation(&y, 1, 1, 2, &w).unwrap();
        let mut h = y.to_vec();
        for wt in w {
            let n = h.len();
            h.push(h[n - 1] + h[n - 2] - h[n - 3] + wt);
        }
        assert_eq!(got, h[5..].to_vec());
    }

    proptest! {
        #[test]
        fn round_trip(series in prop::collection::vec(-1e3f64..1e3, 60..120), b in 0usize..=2, sb in 0usize..=1, m in 1usize..=12) {
            let (d, s) = difference(&series, b, sb, m).unwrap();
            prop_assert_eq!(d.len(), series.len() - b - sb * m);
            let back = integrate(&d, &s).unwrap();
            // rounding in the differences is summed up to three times, so the
            // bound is relative to the series magnitude
            let scale = series.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            for (x, y) in back.iter().zip(&series) {
                prop_assert!((x - y).abs() <= 1e-9 * scale);
            }
        }
    }
}

//! Lag, calendar and sentiment features for the residual booster.

use chrono::{Datelike, NaiveDate};

use crate::{Error, Matrix, Result};

/// Column names in frame order.
pub fn feature_names(lags: &[usize]) -> Vec<String> {
    let mut names: Vec<String> = lags.iter().map(|l| format!("lag_{l}")).collect();
    for d in ["mon", "tue", "wed", "thu", "fri", "sat", "sun"] {
        names.push(format!("dow_{d}"));
    }
    names.push("sentiment".into());
    names
}

pub(crate) fn check_lags(lags: &[usize]) -> Result<usize> {
    if lags.contains(&0) {
        return Err(Error::Config("lags must be positive".into()));
    }
    Ok(lags.iter().copied().max().unwrap_or(0))
}

/// One feature row for time `t`, where `series[..t]` is known.
pub fn feature_row(series: &[f64], t: usize, lags: &[usize], date: NaiveDate, sentiment: f64) -> Vec<f64> {
    let mut row: Vec<f64> = lags.iter().map(|&l| series[t - l]).collect();
    let dow = date.weekday().num_days_from_monday() as usize;
    row.extend((0..7).map(|d| if d == dow { 1.0 } else { 0.0 }));
    row.push(sentiment);
    row
}

/// Rows `t ≥ max lag` with columns `[lags of target, day-of-week one-hot,
/// sentiment]` and the residual at `t` as label. Missing sentiment is 0.
pub fn build_feature_frame(
    dates: &[NaiveDate],
    target: &[f64],
    residuals: &[f64],
    lags: &[usize],
    sentiment: Option<&[f64]>,
) -> Result<(Matrix, Vec<f64>)> {
    let max_lag = check_lags(lags)?;
    let n = target.len();
    if dates.len() != n || residuals.len() != n || sentiment.is_some_and(|s| s.len() != n) {
        return Err(Error::Dimension("feature inputs differ in length".into()));
    }
    if n <= max_lag {
        return Err(Error::TooShort {
            needed: max_lag + 1,
            actual: n,
        });
    }
    let width = lags.len() + 8;
    let mut data = Vec::with_capacity((n - max_lag) * width);
    for t in max_lag..n {
        data.extend(feature_row(target, t, lags, dates[t], sentiment.map_or(0.0, |s| s[t])));
    }
    let features = Matrix::from_vec(n - max_lag, width, data)?;
    Ok((features, residuals[max_lag..].to_vec()))
}

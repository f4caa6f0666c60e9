//! Additive forecast corrected by a booster trained on its residuals.

use chrono::NaiveDate;

use super::features::{build_feature_frame, check_lags, feature_row};
use super::{fit_booster, BoostConfig, BoostedEnsemble};
use crate::additive::{fit, AdditiveConfig, AdditiveModel, Regressor};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct HybridModel {
    pub additive: AdditiveModel,
    pub booster: BoostedEnsemble,
    pub lags: Vec<usize>,
    /// Last `max(lags)` observed values, oldest first.
    pub history_tail: Vec<f64>,
}

/// Fit the additive model (with sentiment as a regressor when given), then
/// boost its in-sample residuals.
pub fn fit_hybrid(
    dates: &[NaiveDate],
    y: &[f64],
    sentiment: Option<&[f64]>,
    additive_cfg: &AdditiveConfig,
    boost_cfg: &BoostConfig,
    lags: &[usize],
) -> Result<HybridModel> {
    let max_lag = check_lags(lags)?;
    let regressors: Vec<Regressor> = sentiment
        .map(|s| Regressor {
            name: "sentiment".into(),
            values: s.to_vec(),
        })
        .into_iter()
        .collect();
    let additive = fit(dates, y, &regressors, additive_cfg)?;
    let rows: Option<Vec<Vec<f64>>> = sentiment.map(|s| s.iter().map(|v| vec![*v]).collect());
    let fitted = additive.values_from(0, dates, rows.as_deref())?;
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let (features, targets) = build_feature_frame(dates, y, &residuals, lags, sentiment)?;
    let booster = fit_booster(&features, &targets, boost_cfg)?;
    Ok(HybridModel {
        additive,
        booster,
        lags: lags.to_vec(),
        history_tail: y[y.len() - max_lag..].to_vec(),
    })
}

/// Additive forecast plus booster correction. Lag features beyond the
/// history come from the corrected forecasts of earlier steps.
pub fn hybrid_forecast(
    additive: &AdditiveModel,
    booster: &BoostedEnsemble,
    lags: &[usize],
    history_tail: &[f64],
    future_dates: &[NaiveDate],
    future_sentiment: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let max_lag = check_lags(lags)?;
    if history_tail.len() < max_lag {
        return Err(Error::TooShort {
            needed: max_lag,
            actual: history_tail.len(),
        });
    }
    if future_sentiment.is_some_and(|s| s.len() != future_dates.len()) {
        return Err(Error::Dimension("future sentiment length differs from horizon".into()));
    }
    let rows: Option<Vec<Vec<f64>>> = future_sentiment.map(|s| s.iter().map(|v| vec![*v]).collect());
    let base = additive.predict(future_dates, rows.as_deref())?;
    let mut series = history_tail.to_vec();
    let mut out = Vec::with_capacity(base.len());
    for (h, (&date, &b)) in future_dates.iter().zip(&base).enumerate() {
        let t = series.len();
        let row = feature_row(&series, t, lags, date, future_sentiment.map_or(0.0, |s| s[h]));
        let corrected = b + booster.predict_row(&row)?;
        series.push(corrected);
        out.push(corrected);
    }
    Ok(out)
}

impl HybridModel {
    pub fn forecast(&self, future_dates: &[NaiveDate], future_sentiment: Option<&[f64]>) -> Result<Vec<f64>> {
        hybrid_forecast(
            &self.additive,
            &self.booster,
            &self.lags,
            &self.history_tail,
            future_dates,
            future_sentiment,
        )
    }
}

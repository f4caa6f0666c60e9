use std::time::Instant;

use chrono::NaiveDate;

use crate::additive::{predict_with_interval, AdditiveConfig, IntervalConfig};
use crate::boosting::{fit_hybrid, BoostConfig};
use crate::lstm::{LstmForecaster, LstmSpec};
use crate::market_data::{BacktestFolds, Fold, OhlcvSeries};
use crate::sarima::{self, SarimaConfig, SarimaOrder};
use crate::sentiment::{align_sentiment, SentimentSeries};
use crate::{Error, ErrorKind, Result};

/// A model family with everything needed to refit it on each fold.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    /// Repeats the last training close.
    Persistence,
    /// Named LSTM configuration, e.g. univariate or multivariate inputs.
    Lstm { name: String, spec: LstmSpec },
    /// Additive model with boosted residual correction. `interval` adds an
    /// uncertainty band around the corrected forecast.
    AdditiveBoost {
        additive: AdditiveConfig,
        boost: BoostConfig,
        lags: Vec<usize>,
        interval: Option<IntervalConfig>,
    },
    Sarima { order: SarimaOrder, config: SarimaConfig },
}

impl ModelSpec {
    pub fn name(&self) -> &str {
        match self {
            ModelSpec::Persistence => super::BASELINE_MODEL,
            ModelSpec::Lstm { name, .. } => name,
            ModelSpec::AdditiveBoost { .. } => "additive_boost",
            ModelSpec::Sarima { .. } => "sarima",
        }
    }
}

/// Lower and upper bounds of an uncertainty band, one pair per step.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastRun {
    pub model: String,
    pub symbol: String,
    /// 1-based fold number.
    pub fold: usize,
    pub dates: Vec<NaiveDate>,
    pub predicted: Vec<f64>,
    pub actual: Vec<f64>,
    pub band: Option<Band>,
    pub seconds: f64,
}

impl ForecastRun {
    pub fn rmse(&self) -> Result<f64> {
        super::rmse(&self.predicted, &self.actual)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldFailure {
    pub model: String,
    pub symbol: String,
    pub fold: usize,
    pub kind: ErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BacktestOutcome {
    pub runs: Vec<ForecastRun>,
    pub failures: Vec<FoldFailure>,
}

/// Fits `spec` on the fold's training slice and forecasts its test window.
///
/// Only `series.slice(0, fold.train.end)` reaches the model. The test
/// window contributes its dates (the trading calendar) and, after the
/// forecast is made, its closes as the actuals.
pub fn run_fold(spec: &ModelSpec, series: &OhlcvSeries, fold: &Fold, sentiment: Option<&SentimentSeries>) -> Result<ForecastRun> {
    if fold.train.start != 0 || fold.test.start != fold.train.end || fold.test.end > series.len() || fold.test.is_empty() {
        return Err(Error::Config(format!("fold {} does not fit a series of {} bars", fold.index, series.len())));
    }
    let started = Instant::now();
    let train = series.slice(0, fold.train.end);
    let horizon = fold.test.len();
    let dates: Vec<NaiveDate> = series.bars[fold.test.clone()].iter().map(|b| b.date).collect();
    let train_sentiment = sentiment.map(|s| align_sentiment(&train.dates(), s));

    let mut band = None;
    let predicted = match spec {
        ModelSpec::Persistence => {
            let last = train.bars.last().ok_or(Error::Empty)?.close;
            vec![last; horizon]
        }
        ModelSpec::Lstm { spec, .. } => {
            if spec.horizon != horizon {
                return Err(Error::Config(format!(
                    "lstm horizon {} differs from fold test length {horizon}",
                    spec.horizon
                )));
            }
            let s = if spec.use_sentiment { train_sentiment.as_deref() } else { None };
            let model = LstmForecaster::fit(&train, s, spec)?;
            model.forecast(&train, s)?
        }
        ModelSpec::AdditiveBoost {
            additive,
            boost,
            lags,
            interval,
        } => {
            let model = fit_hybrid(&train.dates(), &train.closes(), train_sentiment.as_deref(), additive, boost, lags)?;
            let predicted = model.forecast(&dates, None)?;
            if let Some(cfg) = interval {
                let points = predict_with_interval(&model.additive, &dates, None, cfg)?;
                let (lower, upper) = points
                    .iter()
                    .zip(&predicted)
                    .map(|(p, &y)| (p.lower - p.mean + y, p.upper - p.mean + y))
                    .unzip();
                band = Some(Band { lower, upper });
            }
            predicted
        }
        ModelSpec::Sarima { order, config } => sarima::fit(&train.closes(), *order, config)?.forecast(horizon)?,
    };
    if predicted.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("{} forecast on fold {}", spec.name(), fold.index)));
    }
    let actual = series.bars[fold.test.clone()].iter().map(|b| b.close).collect();
    Ok(ForecastRun {
        model: spec.name().to_string(),
        symbol: series.symbol.clone(),
        fold: fold.index,
        dates,
        predicted,
        actual,
        band,
        seconds: started.elapsed().as_secs_f64(),
    })
}

/// Runs every fold in order. A failing fold is recorded and the rest
/// still run.
pub fn run_backtest(
    spec: &ModelSpec,
    series: &OhlcvSeries,
    folds: &BacktestFolds,
    sentiment: Option<&SentimentSeries>,
) -> BacktestOutcome {
    let mut out = BacktestOutcome::default();
    for fold in folds.iter() {
        match run_fold(spec, series, fold, sentiment) {
            Ok(run) => out.runs.push(run),
            Err(e) => {
                log::warn!("{} fold {} on {}: {e}", spec.name(), fold.index, series.symbol);
                out.failures.push(FoldFailure {
                    model: spec.name().to_string(),
                    symbol: series.symbol.clone(),
                    fold: fold.index,
                    kind: e.kind(),
                    message: e.to_string(),
                });
            }
        }
    }
    out
}

/// Corrupts every bar and sentiment score from the fold's test start on,
/// reruns the fold, and reports whether the predictions are bit-identical
/// to the clean run.
pub fn leakage_probe(
    spec: &ModelSpec,
    series: &OhlcvSeries,
    fold: &Fold,
    sentiment: Option<&SentimentSeries>,
) -> Result<bool> {
    let clean = run_fold(spec, series, fold, sentiment)?;
    let mut corrupted = series.clone();
    for (i, bar) in corrupted.bars.iter_mut().enumerate().skip(fold.test.start) {
        let scale = 3.0 + (i % 7) as f64;
        bar.open *= scale;
        bar.high *= scale * 1.5;
        bar.low *= 0.5;
        bar.close *= scale;
        bar.volume = bar.volume.wrapping_mul(13).wrapping_add(7);
    }
    let cutoff = series.bars[fold.test.start].date;
    let corrupted_sentiment = sentiment.map(|s| {
        let mut s = s.clone();
        for (_, v) in s.scores.range_mut(cutoff..) {
            *v = -*v + 0.5;
        }
        s
    });
    let dirty = run_fold(spec, &corrupted, fold, corrupted_sentiment.as_ref())?;
    Ok(clean.predicted.len() == dirty.predicted.len()
        && clean
            .predicted
            .iter()
            .zip(&dirty.predicted)
            .all(|(a, b)| a.to_bits() == b.to_bits()))
}

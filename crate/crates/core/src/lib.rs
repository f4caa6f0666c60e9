//! Forecasting engine for daily OHLCV price series.
//!
//! Four model families share one data pipeline:
//!
//! - [`lstm`]: a single-layer LSTM trained from scratch with BPTT and Adam,
//!   producing direct multistep forecasts from univariate or multivariate
//!   windows.
//! - [`additive`]: trend + Fourier seasonality + holiday/exogenous model with
//!   simulated uncertainty intervals, optionally corrected by the
//!   gradient-boosted residual model in [`boosting`] and tuned with
//!   [`tuner`].
//! - [`sarima`]: seasonal ARIMA fitted by conditional sum of squares.
//! - [`sentiment`]: HMM/Viterbi decoding of tokenized news into daily
//!   sentiment scores used as exogenous regressors.
//!
//! [`market_data`] handles ingestion, scaling, windowing and backtest folds;
//! [`evaluation`] runs rolling-origin backtests and builds RMSE reports.

pub mod additive;
pub mod boosting;
mod error;
pub mod evaluation;
pub mod lstm;
pub mod market_data;
pub mod matrix;
pub(crate) mod optim;
pub mod sarima;
pub mod sentiment;
pub mod synthetic;
pub(crate) mod textfmt;
pub mod tuner;

pub use error::{Error, ErrorKind, Result};
pub use matrix::Matrix;

//! RMSE, rolling-origin backtests over every model family, and comparison
//! reports.

mod backtest;
mod report;

pub use backtest::{leakage_probe, run_backtest, run_fold, Band, BacktestOutcome, FoldFailure, ForecastRun, ModelSpec};
pub use report::{build_report, config_hash, ComparisonReport, DataRange, FailureRecord, ReportCell, ReportMetadata, BASELINE_MODEL};

use crate::{Error, Result};

/// Root mean squared error.
pub fn rmse(predicted: &[f64], actual: &[f64]) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::Dimension(format!(
            "{} predictions for {} actuals",
            predicted.len(),
            actual.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::Empty);
    }
    let sse: f64 = predicted.iter().zip(actual).map(|(p, a)| (p - a) * (p - a)).sum();
    Ok((sse / predicted.len() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_term_example() {
        let r = rmse(&[1.0, 2.0, 3.0], &[2.0, 2.0, 4.0]).unwrap();
        assert!((r - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(matches!(rmse(&[], &[]), Err(Error::Empty)));
        assert!(matches!(rmse(&[1.0], &[1.0, 2.0]), Err(Error::Dimension(_))));
    }
}

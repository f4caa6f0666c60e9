//! OHLCV ingestion, validation, scaling, windowing and backtest folds.

mod csv_io;
#[cfg(feature = "fetch")]
mod fetch;
mod folds;
mod scaling;
mod windows;

use chrono::{Datelike, Duration, NaiveDate, Weekday};

pub use csv_io::{parse_csv, serialize_csv, CSV_HEADER};
#[cfg(feature = "fetch")]
pub use fetch::{expand_endpoint, fetch_remote};
pub use folds::{rolling_splits, BacktestFolds, Fold};
pub use scaling::{scale_minmax, ScaleParams};
pub use windows::{split_sequences, window_columns, WindowedDataset};

use crate::{Error, Matrix, Result};

/// One daily bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhlcvBar {
    pub date: NaiveDate,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub volume: u64,
}

impl OhlcvBar {
    /// Checks price positivity and the high/low envelope.
    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| Err(Error::InvalidBar {
            date: self.date,
            message,
        });
        for (name, v) in [
            ("open", self.open),
            ("high", self.high),
            ("low", self.low),
            ("close", self.close),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return bad(format!("{name} must be a positive price, got {v}"));
            }
        }
        if self.low > self.open.min(self.close) {
            return bad(format!(
                "low {} above min(open, close) {}",
                self.low,
                self.open.min(self.close)
            ));
        }
        if self.high < self.open.max(self.close) {
            return bad(format!(
                "high {} below max(open, close) {}",
                self.high,
                self.open.max(self.close)
            ));
        }
        Ok(())
    }

    pub fn get(&self, field: Field) -> f64 {
        match field {
            Field::Open => self.open,
            Field::High => self.high,
            Field::Low => self.low,
            Field::Close => self.close,
            Field::Volume => self.volume as f64,
        }
    }
}

/// Column selector for building feature matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Open,
    High,
    Low,
    Close,
    Volume,
}

impl Field {
    pub const ALL: [Field; 5] = [
        Field::Open,
        Field::High,
        Field::Low,
        Field::Close,
        Field::Volume,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::Open => "open",
            Field::High => "high",
            Field::Low => "low",
            Field::Close => "close",
            Field::Volume => "volume",
        }
    }

    pub fn parse(s: &str) -> Result<Field> {
        Field::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown field `{s}`")))
    }
}

/// Date-ordered bars for one ticker.
#[derive(Debug, Clone, PartialEq)]
pub struct OhlcvSeries {
    pub symbol: String,
    pub bars: Vec<OhlcvBar>,
}

impl OhlcvSeries {
    /// Validates every bar and the strict date ordering.
    pub fn new(symbol: impl Into<String>, bars: Vec<OhlcvBar>) -> Result<Self> {
        if bars.is_empty() {
            return Err(Error::Empty);
        }
        for (i, bar) in bars.iter().enumerate() {
            bar.validate()?;
            if i > 0 && bar.date <= bars[i - 1].date {
                return Err(Error::NonMonotoneDates {
                    line: i as u64 + 2,
                    date: bar.date,
                });
            }
        }
        Ok(Self {
            symbol: symbol.into(),
            bars,
        })
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.bars.iter().map(|b| b.date).collect()
    }

    pub fn field(&self, field: Field) -> Vec<f64> {
        self.bars.iter().map(|b| b.get(field)).collect()
    }

    pub fn closes(&self) -> Vec<f64> {
        self.field(Field::Close)
    }

    /// `T x fields.len()` matrix of the chosen columns.
    pub fn matrix(&self, fields: &[Field]) -> Matrix {
        let mut m = Matrix::zeros(self.len(), fields.len());
        for (i, bar) in self.bars.iter().enumerate() {
            for (j, &f) in fields.iter().enumerate() {
                m.set(i, j, bar.get(f));
            }
        }
        m
    }

    /// Bars `[start, end)` as a new series.
    pub fn slice(&self, start: usize, end: usize) -> OhlcvSeries {
        OhlcvSeries {
            symbol: self.symbol.clone(),
            bars: self.bars[start..end].to_vec(),
        }
    }
}

/// The next `n` weekdays strictly after `last`.
///
/// Exchange holidays are not modelled; bars are indexed by position.
pub fn next_trading_days(last: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = last;
    while out.len() < n {
        d += Duration::days(1);
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bar(day: u32, o: f64, h: f64, l: f64, c: f64) -> OhlcvBar {
        OhlcvBar {
            date: NaiveDate::from_ymd_opt(2024, 1, day).unwrap(),
            open: o,
            high: h,
            low: l,
            close: c,
            volume: 10,
        }
    }

    #[test]
    fn bar_envelope_checks() {
        assert!(bar(2, 10.0, 11.0, 9.0, 10.5).validate().is_ok());
        assert!(bar(2, 10.0, 10.2, 10.3, 10.1).validate().is_err());
        assert!(bar(2, 10.0, 9.9, 9.0, 9.5).validate().is_err());
        assert!(bar(2, -1.0, 11.0, 9.0, 10.5).validate().is_err());
    }

    #[test]
    fn duplicate_dates_rejected() {
        let b = bar(2, 10.0, 11.0, 9.0, 10.5);
        assert!(matches!(
            OhlcvSeries::new("X", vec![b, b]),
            Err(Error::NonMonotoneDates { .. })
        ));
    }

    #[test]
    fn trading_days_skip_weekends() {
        // 2024-01-05 is a Friday.
        let fri = NaiveDate::from_ymd_opt(2024, 1, 5).unwrap();
        let days = next_trading_days(fri, 3);
        assert_eq!(
            days,
            vec![
                NaiveDate::from_ymd_opt(2024, 1, 8).unwrap(),
                NaiveDate::from_ymd_opt(2024, 1, 9).unwrap(),
                NaiveDate::from_ymd_opt(2024, 1, 10).unwrap(),
            ]
        );
    }
}

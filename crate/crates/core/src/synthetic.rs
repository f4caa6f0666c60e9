//! Deterministic synthetic market data for demos, fixtures and tests.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::market_data::{next_trading_days, OhlcvBar, OhlcvSeries};

/// A daily OHLCV series starting on the first trading day of 2015:
/// a log random walk with drift, a mild 5-day cycle, and volume that rises
/// with absolute returns.
pub fn ohlcv(symbol: &str, n: usize, seed: u64) -> OhlcvSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shock = Normal::new(0.0, 1.0).unwrap();
    let start = NaiveDate::from_ymd_opt(2014, 12, 31).unwrap();
    let dates = next_trading_days(start, n);
    let mut close = 100.0 + 50.0 * rng.random::<f64>();
    let mut bars = Vec::with_capacity(n);
    for (t, date) in dates.into_iter().enumerate() {
        let cycle = 0.004 * (2.0 * std::f64::consts::PI * t as f64 / 5.0).sin();
        let open = close * (1.0 + 0.003 * shock.sample(&mut rng));
        let ret = 0.0003 + cycle + 0.012 * shock.sample(&mut rng);
        close = open * ret.exp();
        let high = open.max(close) * (1.0 + 0.006 * rng.random::<f64>());
        let low = open.min(close) * (1.0 - 0.006 * rng.random::<f64>());
        let volume = (1_000_000.0 * (1.0 + 30.0 * ret.abs()) * (0.8 + 0.4 * rng.random::<f64>())) as u64;
        bars.push(OhlcvBar {
            date,
            open,
            high,
            low,
            close,
            volume,
        });
    }
    OhlcvSeries {
        symbol: symbol.to_string(),
        bars,
    }
}

/// `level + slope * t + amplitude * sin(2πt / period) + noise`.
pub fn seasonal_series(n: usize, level: f64, slope: f64, amplitude: f64, period: f64, noise: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = Normal::new(0.0, 1.0).unwrap();
    (0..n)
        .map(|t| {
            let t = t as f64;
            level + slope * t + amplitude * (2.0 * std::f64::consts::PI * t / period).sin() + noise * eps.sample(&mut rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_bars_are_valid() {
        let s = ohlcv("SYN", 300, 1);
        assert_eq!(s.len(), 300);
        let checked = OhlcvSeries::new("SYN", s.bars.clone()).unwrap();
        assert_eq!(checked, s);
        assert_eq!(ohlcv("SYN", 300, 1), s);
    }
}

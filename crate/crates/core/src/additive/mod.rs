//! Decomposable additive forecaster `y(t) = g(t) + s(t) + h(t) + ε_t`.
//!
//! `g` is a piecewise-linear or logistic trend with rate changes at fixed
//! changepoints, `s` a sum of truncated Fourier series, and `h` holiday
//! indicators plus exogenous regressors (daily sentiment). Time `t` is the
//! bar index counted from the first training bar.

mod fit;
mod interval;
mod io;

use std::collections::BTreeSet;
use std::f64::consts::PI;

use chrono::NaiveDate;

pub use fit::{changepoint_grid, fit, AdditiveConfig, Growth, HolidayConfig, Regressor, SeasonalityConfig};
pub use interval::{predict_with_interval, IntervalConfig, IntervalPoint};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrendKind {
    Linear,
    Logistic { capacity: f64 },
}

/// Trend parameters. `gammas` are always derived from the other fields so
/// the trend stays continuous at each changepoint.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendSpec {
    pub kind: TrendKind,
    pub k: f64,
    pub m: f64,
    pub changepoints: Vec<f64>,
    pub deltas: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl TrendSpec {
    pub fn linear(k: f64, m: f64, changepoints: Vec<f64>, deltas: Vec<f64>) -> Result<Self> {
        Self::new(TrendKind::Linear, k, m, changepoints, deltas)
    }

    pub fn logistic(capacity: f64, k: f64, m: f64, changepoints: Vec<f64>, deltas: Vec<f64>) -> Result<Self> {
        Self::new(TrendKind::Logistic { capacity }, k, m, changepoints, deltas)
    }

    pub fn new(kind: TrendKind, k: f64, m: f64, changepoints: Vec<f64>, deltas: Vec<f64>) -> Result<Self> {
        let mut spec = Self {
            kind,
            k,
            m,
            changepoints,
            deltas,
            gammas: Vec::new(),
        };
        spec.gammas = tied_gammas(kind, k, m, &spec.changepoints, &spec.deltas);
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.changepoints.len() != self.deltas.len() || self.gammas.len() != self.deltas.len() {
            return Err(Error::Config("changepoints, deltas and gammas differ in length".into()));
        }
        if self.changepoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("changepoints must be strictly increasing".into()));
        }
        let all = [self.k, self.m]
            .iter()
            .chain(&self.changepoints)
            .chain(&self.deltas)
            .chain(&self.gammas)
            .all(|v| v.is_finite());
        if !all {
            return Err(Error::NonFinite("trend parameter".into()));
        }
        match self.kind {
            TrendKind::Logistic { capacity } if !(capacity > 0.0 && capacity.is_finite()) => {
                Err(Error::Config("logistic capacity must be positive".into()))
            }
            TrendKind::Linear => {
                for ((s, d), g) in self.changepoints.iter().zip(&self.deltas).zip(&self.gammas) {
                    if (g + s * d).abs() > 1e-9 * (1.0 + (s * d).abs()) {
                        return Err(Error::Config(format!("gamma at changepoint {s} breaks continuity")));
                    }
                }
                Ok(())
            }
            TrendKind::Logistic { .. } => Ok(()),
        }
    }

    /// `(k + a(t)ᵀδ, m + a(t)ᵀγ)` with `a_j(t) = 1` once `t ≥ s_j`.
    fn rate_and_offset(&self, t: f64) -> (f64, f64) {
        let mut rate = self.k;
        let mut offset = self.m;
        for ((&s, &d), &g) in self.changepoints.iter().zip(&self.deltas).zip(&self.gammas) {
            if t >= s {
                rate += d;
                offset += g;
            }
        }
        (rate, offset)
    }
}

/// Offset adjustments that make the trend continuous.
///
/// Linear: `γ_j = -s_j δ_j`. Logistic: each offset is moved so the curve
/// passes through the same point on both sides of `s_j`.
pub(crate) fn tied_gammas(kind: TrendKind, k: f64, m: f64, changepoints: &[f64], deltas: &[f64]) -> Vec<f64> {
    match kind {
        TrendKind::Linear => changepoints.iter().zip(deltas).map(|(s, d)| -s * d).collect(),
        TrendKind::Logistic { .. } => {
            let mut gammas = Vec::with_capacity(deltas.len());
            let mut rate = k;
            let mut offset = m;
            for (&s, &d) in changepoints.iter().zip(deltas) {
                let next = rate + d;
                let g = if next.abs() < 1e-300 {
                    0.0
                } else {
                    (s - offset) * (1.0 - rate / next)
                };
                gammas.push(g);
                offset += g;
                rate = next;
            }
            gammas
        }
    }
}

/// Trend value at time `t`.
pub fn eval_trend(t: f64, spec: &TrendSpec) -> f64 {
    let (rate, offset) = spec.rate_and_offset(t);
    match spec.kind {
        TrendKind::Linear => rate * t + offset,
        TrendKind::Logistic { capacity } => capacity / (1.0 + (-rate * (t - offset)).exp()),
    }
}

/// One Fourier seasonality block of period `period` with `a.len()` terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonalitySpec {
    pub period: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl SeasonalitySpec {
    pub fn terms(&self) -> usize {
        self.a.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(Error::Config("seasonality period must be positive".into()));
        }
        if self.a.is_empty() || self.a.len() != self.b.len() {
            return Err(Error::Config("seasonality needs N ≥ 1 cosine and sine coefficients".into()));
        }
        if !self.a.iter().chain(&self.b).all(|v| v.is_finite()) {
            return Err(Error::NonFinite("Fourier coefficient".into()));
        }
        Ok(())
    }
}

/// `Σ_n a_n cos(2πnt/P) + b_n sin(2πnt/P)`.
pub fn eval_seasonality(t: f64, spec: &SeasonalitySpec) -> f64 {
    spec.a
        .iter()
        .zip(&spec.b)
        .enumerate()
        .map(|(i, (a, b))| {
            let x = 2.0 * PI * (i + 1) as f64 * t / spec.period;
            a * x.cos() + b * x.sin()
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolidayEvent {
    pub name: String,
    pub beta: f64,
    pub dates: BTreeSet<NaiveDate>,
}

impl HolidayEvent {
    pub fn indicator(&self, date: NaiveDate) -> f64 {
        if self.dates.contains(&date) {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HolidaySpec {
    pub events: Vec<HolidayEvent>,
}

/// `Σ_j β_j D_j(date)` plus `exo_coefs · exo_row` when a row is given.
pub fn eval_holiday(date: NaiveDate, spec: &HolidaySpec, exo_coefs: &[f64], exo_row: Option<&[f64]>) -> Result<f64> {
    let mut v: f64 = spec.events.iter().map(|e| e.beta * e.indicator(date)).sum();
    if let Some(row) = exo_row {
        if row.len() != exo_coefs.len() {
            return Err(Error::Dimension(format!(
                "exogenous row has {} values, model has {} regressors",
                row.len(),
                exo_coefs.len()
            )));
        }
        v += row.iter().zip(exo_coefs).map(|(x, c)| x * c).sum::<f64>();
    }
    Ok(v)
}

/// A fitted additive model.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveModel {
    pub trend: TrendSpec,
    pub seasonalities: Vec<SeasonalitySpec>,
    pub holidays: HolidaySpec,
    pub exogenous_names: Vec<String>,
    pub exogenous_coefs: Vec<f64>,
    /// Standard deviation of the in-sample residuals.
    pub residual_sigma: f64,
    /// Date of the bar at `t = 0`; one time unit is one bar.
    pub origin: NaiveDate,
    pub history_len: usize,
    pub last_date: NaiveDate,
}

impl AdditiveModel {
    /// `g(t) + Σ s(t) + h(t)`: the single definition used for fitting
    /// checks, forecasting and plotting.
    pub fn value(&self, t: f64, date: NaiveDate, exo_row: Option<&[f64]>) -> Result<f64> {
        let seasonal: f64 = self.seasonalities.iter().map(|s| eval_seasonality(t, s)).sum();
        Ok(eval_trend(t, &self.trend) + seasonal + eval_holiday(date, &self.holidays, &self.exogenous_coefs, exo_row)?)
    }

    /// Values at consecutive time indices starting at `t0`.
    pub fn values_from(&self, t0: usize, dates: &[NaiveDate], exogenous: Option<&[Vec<f64>]>) -> Result<Vec<f64>> {
        if let Some(exo) = exogenous {
            if exo.len() != dates.len() {
                return Err(Error::Dimension(format!(
                    "{} exogenous rows for {} dates",
                    exo.len(),
                    dates.len()
                )));
            }
        }
        dates
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let row = exogenous.map(|e| e[i].as_slice());
                let row = if self.exogenous_coefs.is_empty() { None } else { row };
                self.value((t0 + i) as f64, d, row)
            })
            .collect()
    }

    /// Deterministic extrapolation for the bars after the history.
    pub fn predict(&self, future_dates: &[NaiveDate], future_exogenous: Option<&[Vec<f64>]>) -> Result<Vec<f64>> {
        self.values_from(self.history_len, future_dates, future_exogenous)
    }

    pub fn save(&self) -> String {
        io::save(self)
    }

    pub fn load(text: &str) -> Result<Self> {
        io::load(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn linear_without_changepoints() {
        let spec = TrendSpec::linear(2.0, 1.0, vec![], vec![]).unwrap();
        assert_eq!(eval_trend(3.0, &spec), 7.0);
    }

    #[test]
    fn slope_kicks_in_at_changepoint() {
        let spec = TrendSpec::linear(0.0, 0.0, vec![5.0], vec![1.0]).unwrap();
        assert_eq!(spec.gammas, vec![-5.0]);
        assert_eq!(eval_trend(4.0, &spec), 0.0);
        assert_eq!(eval_trend(6.0, &spec), 1.0);
        assert_eq!(eval_trend(5.0, &spec), 0.0);
    }

    #[test]
    fn broken_continuity_rejected() {
        let mut spec = TrendSpec::linear(0.0, 0.0, vec![5.0], vec![1.0]).unwrap();
        spec.gammas[0] = 0.0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn logistic_saturates() {
        let c = 80.0;
        let spec = TrendSpec::logistic(c, 50.0, 10.0, vec![], vec![]).unwrap();
        for t in [11.0, 15.0, 100.0] {
            assert!((eval_trend(t, &spec) - c).abs() < 1e-9 * c);
        }
        assert!((eval_trend(10.0, &spec) - c / 2.0).abs() < 1e-12);
    }

    #[test]
    fn logistic_tie_is_continuous() {
        let spec = TrendSpec::logistic(10.0, 0.2, 5.0, vec![8.0, 15.0], vec![0.3, -0.25]).unwrap();
        for &s in &spec.changepoints {
            let before = eval_trend(s - 1e-9, &spec);
            let after = eval_trend(s, &spec);
            assert!((before - after).abs() < 1e-6, "{before} vs {after}");
        }
    }

    #[test]
    fn cosine_values() {
        let spec = SeasonalitySpec {
            period: 10.0,
            a: vec![1.0],
            b: vec![0.0],
        };
        assert!((eval_seasonality(0.0, &spec) - 1.0).abs() < 1e-12);
        assert!((eval_seasonality(5.0, &spec) + 1.0).abs() < 1e-12);
        assert!(eval_seasonality(2.5, &spec).abs() < 1e-12);
        let zero = SeasonalitySpec {
            period: 7.0,
            a: vec![0.0; 3],
            b: vec![0.0; 3],
        };
        assert_eq!(eval_seasonality(3.3, &zero), 0.0);
    }

    fn day(d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2024, 3, d).unwrap()
    }

    #[test]
    fn holiday_sums_and_exogenous() {
        let spec = HolidaySpec {
            events: vec![
                HolidayEvent {
                    name: "a".into(),
                    beta: 1.5,
                    dates: [day(4), day(5)].into(),
                },
                HolidayEvent {
                    name: "b".into(),
                    beta: -0.5,
                    dates: [day(5)].into(),
                },
            ],
        };
        assert_eq!(eval_holiday(day(6), &spec, &[], None).unwrap(), 0.0);
        assert_eq!(eval_holiday(day(5), &spec, &[], None).unwrap(), 1.0);
        let v = eval_holiday(day(6), &spec, &[3.0], Some(&[0.2])).unwrap();
        assert!((v - 0.6).abs() < 1e-15);
        assert!(matches!(
            eval_holiday(day(6), &spec, &[3.0], Some(&[0.2, 1.0])),
            Err(Error::Dimension(_))
        ));
    }

    proptest! {
        #[test]
        fn seasonality_is_periodic(period in 1.0f64..400.0, coefs in prop::collection::vec(-5.0f64..5.0, 2..20), t in -1000.0f64..1000.0) {
            let n = coefs.len() / 2;
            let spec = SeasonalitySpec { period, a: coefs[..n].to_vec(), b: coefs[n..2 * n].to_vec() };
            prop_assert!((eval_seasonality(t + period, &spec) - eval_seasonality(t, &spec)).abs() < 1e-9);
        }

        #[test]
        fn linear_trend_is_continuous(k in -2.0f64..2.0, m in -50.0f64..50.0, raw in prop::collection::vec((1.0f64..500.0, -1.0f64..1.0), 1..10)) {
            let mut cps: Vec<(f64, f64)> = raw;
            cps.sort_by(|a, b| a.0.total_cmp(&b.0));
            cps.dedup_by(|a, b| a.0 == b.0);
            let spec = TrendSpec::linear(k, m, cps.iter().map(|c| c.0).collect(), cps.iter().map(|c| c.1).collect()).unwrap();
            for &s in &spec.changepoints {
                let jump = (eval_trend(s + 1e-9, &spec) - eval_trend(s - 1e-9, &spec)).abs();
                prop_assert!(jump < 1e-6);
            }
        }
    }
}

//! Simulation-based uncertainty intervals.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{eval_trend, AdditiveModel, TrendSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalConfig {
    pub n_sims: usize,
    /// Central coverage of the band, in (0, 1).
    pub level: f64,
    pub seed: u64,
}

impl Default for IntervalConfig {
    fn default() -> Self {
        Self {
            n_sims: 1000,
            level: 0.8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalPoint {
    pub date: NaiveDate,
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Deterministic forecast plus empirical quantile bands.
///
/// Each simulated path adds future changepoints (one per step with
/// probability `J / history_len`, magnitude Laplace with the mean historical
/// `|δ|` as scale) and Gaussian noise with `residual_sigma`. Path `i` draws
/// from ChaCha stream `i` under `cfg.seed`.
pub fn predict_with_interval(
    model: &AdditiveModel,
    future_dates: &[NaiveDate],
    future_exogenous: Option<&[Vec<f64>]>,
    cfg: &IntervalConfig,
) -> Result<Vec<IntervalPoint>> {
    if !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(Error::Config(format!("interval level {} outside (0, 1)", cfg.level)));
    }
    if cfg.n_sims < 100 {
        return Err(Error::Config(format!("n_sims must be at least 100, got {}", cfg.n_sims)));
    }
    let h = future_dates.len();
    let mean = model.predict(future_dates, future_exogenous)?;
    let t0 = model.history_len;
    let times: Vec<f64> = (0..h).map(|i| (t0 + i) as f64).collect();
    let base_trend: Vec<f64> = times.iter().map(|&t| eval_trend(t, &model.trend)).collect();

    let trend = &model.trend;
    let j = trend.deltas.len();
    let scale = if j == 0 {
        0.0
    } else {
        trend.deltas.iter().map(|d| d.abs()).sum::<f64>() / j as f64
    };
    let rate = j as f64 / model.history_len as f64;
    let simulate_trend = scale > 0.0 && rate > 0.0;
    let sigma = model.residual_sigma;

    let mut paths = vec![Vec::with_capacity(cfg.n_sims); h];
    for path in 0..cfg.n_sims {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(path as u64);
        let path_trend = if simulate_trend {
            let mut cps = trend.changepoints.clone();
            let mut deltas = trend.deltas.clone();
            for &t in &times {
                if rng.random::<f64>() < rate {
                    let u: f64 = rng.random::<f64>() - 0.5;
                    cps.push(t);
                    deltas.push(-scale * u.signum() * (1.0 - 2.0 * u.abs()).ln());
                }
            }
            if cps.len() > j {
                let ext = TrendSpec::new(trend.kind, trend.k, trend.m, cps, deltas)?;
                Some(times.iter().map(|&t| eval_trend(t, &ext)).collect::<Vec<_>>())
            } else {
                None
            }
        } else {
            None
        };
        for i in 0..h {
            let mut v = mean[i];
            if let Some(pt) = &path_trend {
                v += pt[i] - base_trend[i];
            }
            if sigma > 0.0 {
                let z: f64 = rng.sample(StandardNormal);
                v += sigma * z;
            }
            paths[i].push(v);
        }
    }

    let lo_q = (1.0 - cfg.level) / 2.0;
    let hi_q = (1.0 + cfg.level) / 2.0;
    Ok(paths
        .iter_mut()
        .enumerate()
        .map(|(i, draws)| {
            draws.sort_by(f64::total_cmp);
            IntervalPoint {
                date: future_dates[i],
                mean: mean[i],
                lower: quantile(draws, lo_q).min(mean[i]),
                upper: quantile(draws, hi_q).max(mean[i]),
            }
        })
        .collect())
}

/// Linear interpolation between order statistics of a sorted sample.
pub(crate) fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::additive::HolidaySpec;
    use crate::market_data::next_trading_days;

    fn model(sigma: f64, trend: TrendSpec) -> AdditiveModel {
        let origin = NaiveDate::from_ymd_opt(2021, 1, 4).unwrap();
        AdditiveModel {
            trend,
            seasonalities: vec![],
            holidays: HolidaySpec::default(),
            exogenous_names: vec![],
            exogenous_coefs: vec![],
            residual_sigma: sigma,
            origin,
            history_len: 100,
            last_date: origin,
        }
    }

    fn future(m: &AdditiveModel, h: usize) -> Vec<NaiveDate> {
        next_trading_days(m.last_date, h)
    }

    #[test]
    fn no_randomness_collapses_band() {
        let m = model(0.0, TrendSpec::linear(0.3, 2.0, vec![], vec![]).unwrap());
        for p in predict_with_interval(&m, &future(&m, 10), None, &IntervalConfig::default()).unwrap() {
            assert_eq!(p.lower, p.mean);
            assert_eq!(p.upper, p.mean);
        }
    }

    #[test]
    fn pure_noise_matches_normal_quantile() {
        let m = model(1.0, TrendSpec::linear(0.0, 0.0, vec![], vec![]).unwrap());
        let cfg = IntervalConfig {
            n_sims: 10_000,
            level: 0.8,
            seed: 7,
        };
        for p in predict_with_interval(&m, &future(&m, 5), None, &cfg).unwrap() {
            let half = (p.upper - p.lower) / 2.0;
            assert!((half / 1.2816 - 1.0).abs() < 0.05, "half width {half}");
        }
    }

    #[test]
    fn wider_level_never_narrows() {
        let m = model(0.5, TrendSpec::linear(0.1, 0.0, vec![30.0, 60.0], vec![0.2, -0.1]).unwrap());
        let d = future(&m, 20);
        let narrow = predict_with_interval(&m, &d, None, &IntervalConfig { level: 0.5, ..Default::default() }).unwrap();
        let wide = predict_with_interval(&m, &d, None, &IntervalConfig { level: 0.95, ..Default::default() }).unwrap();
        for (a, b) in narrow.iter().zip(&wide) {
            assert!(b.lower <= a.lower && b.upper >= a.upper);
            assert!(a.lower <= a.mean && a.mean <= a.upper);
        }
    }

    #[test]
    fn bad_arguments() {
        let m = model(1.0, TrendSpec::linear(0.0, 0.0, vec![], vec![]).unwrap());
        let d = future(&m, 3);
        assert!(predict_with_interval(&m, &d, None, &IntervalConfig { n_sims: 99, ..Default::default() }).is_err());
        assert!(predict_with_interval(&m, &d, None, &IntervalConfig { level: 1.0, ..Default::default() }).is_err());
    }

    #[test]
    fn seeded_and_reproducible() {
        let m = model(0.5, TrendSpec::linear(0.1, 0.0, vec![30.0], vec![0.2]).unwrap());
        let d = future(&m, 15);
        let c = IntervalConfig::default();
        assert_eq!(
            predict_with_interval(&m, &d, None, &c).unwrap(),
            predict_with_interval(&m, &d, None, &c).unwrap()
        );
    }

    #[test]
    fn quantile_interpolates() {
        let s = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(quantile(&s, 0.5), 1.5);
        assert_eq!(quantile(&s, 1.0), 3.0);
    }
}

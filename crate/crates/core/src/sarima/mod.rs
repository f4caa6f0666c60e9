//! Seasonal ARIMA `(a,b,c)(A,B,C)_m` fitted by conditional sum of squares.
//!
//! The differenced series `w = (1 − L)^b (1 − L^m)^B y` follows
//! `Φ(L^m) φ(L) (w_t − μ) = Θ(L^m) θ(L) e_t`, with `μ` only present when no
//! differencing is applied. Coefficients are searched in an unconstrained
//! space mapped through the partial-autocorrelation transform, so every
//! candidate is stationary and invertible.

mod css;
mod diff;
mod io;
mod roots;
mod transform;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub use css::{css_loss, expand_ar, expand_ma, residuals, SarimaCoefficients};
pub use diff::{difference, integrate, integrate_continuation, DifferenceState};
pub use roots::min_root_modulus;
pub use transform::{from_invertible, from_stationary, to_invertible, to_stationary};

use crate::optim::{gradient_norm, nelder_mead, NelderMeadConfig};
use crate::{Error, Result};

/// Orders `(a, b, c)(A, B, C)_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SarimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub seasonal_p: usize,
    pub seasonal_d: usize,
    pub seasonal_q: usize,
    pub m: usize,
}

impl SarimaOrder {
    pub fn new(p: usize, d: usize, q: usize, seasonal_p: usize, seasonal_d: usize, seasonal_q: usize, m: usize) -> Self {
        Self {
            p,
            d,
            q,
            seasonal_p,
            seasonal_d,
            seasonal_q,
            m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let seasonal = self.seasonal_p + self.seasonal_d + self.seasonal_q > 0;
        if seasonal && self.m == 0 {
            return Err(Error::Config("season length m must be ≥ 1 with seasonal terms".into()));
        }
        if self.d > 3 || self.seasonal_d > 3 {
            return Err(Error::Config("differencing orders above 3 are not supported".into()));
        }
        Ok(())
    }

    pub fn has_intercept(&self) -> bool {
        self.d + self.seasonal_d == 0
    }

    /// Levels consumed by differencing, `b + B·m`.
    pub fn diff_span(&self) -> usize {
        self.d + self.seasonal_d * self.m
    }

    /// Largest AR lag, `a + A·m`.
    pub fn ar_span(&self) -> usize {
        self.p + self.seasonal_p * self.m
    }

    /// Largest MA lag, `c + C·m`.
    pub fn ma_span(&self) -> usize {
        self.q + self.seasonal_q * self.m
    }

    fn n_params(&self) -> usize {
        self.p + self.q + self.seasonal_p + self.seasonal_q + usize::from(self.has_intercept())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SarimaConfig {
    pub max_iter: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SarimaConfig {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            restarts: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SarimaModel {
    pub order: SarimaOrder,
    pub coefficients: SarimaCoefficients,
    /// Innovation variance `σ²`.
    pub sigma2: f64,
    /// Last `b + B·m` observed levels.
    pub level_tail: Vec<f64>,
    /// Last `a + A·m` differenced values.
    pub diff_tail: Vec<f64>,
    /// Last `c + C·m` in-sample residuals.
    pub resid_tail: Vec<f64>,
}

fn unpack(order: &SarimaOrder, x: &[f64], mean: f64, sd: f64) -> SarimaCoefficients {
    let mut at = 0;
    let mut take = |n: usize| {
        let s = &x[at..at + n];
        at += n;
        s.to_vec()
    };
    let phi = to_stationary(&take(order.p));
    let theta = to_invertible(&take(order.q));
    let seasonal_phi = to_stationary(&take(order.seasonal_p));
    let seasonal_theta = to_invertible(&take(order.seasonal_q));
    let intercept = if order.has_intercept() { mean + sd * take(1)[0] } else { 0.0 };
    SarimaCoefficients {
        phi,
        theta,
        seasonal_phi,
        seasonal_theta,
        intercept,
    }
}

/// Fit by minimizing the CSS loss with Nelder-Mead: one run from the
/// origin, then `cfg.restarts` runs from seeded jitters of the best point.
pub fn fit(series: &[f64], order: SarimaOrder, cfg: &SarimaConfig) -> Result<SarimaModel> {
    order.validate()?;
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("series value".into()));
    }
    let needed = order.diff_span() + order.ar_span() + order.n_params() + 2;
    if series.len() < needed {
        return Err(Error::TooShort {
            needed,
            actual: series.len(),
        });
    }
    if order.diff_span() as f64 > 0.2 * series.len() as f64 {
        log::warn!(
            "differencing consumes {} of {} observations",
            order.diff_span(),
            series.len()
        );
    }
    let (w, _) = difference(series, order.d, order.seasonal_d, order.m)?;
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    let sd = (w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / w.len() as f64).sqrt().max(1e-12);

    let objective = |x: &[f64]| css_loss(&unpack(&order, x, mean, sd), &w, &order).unwrap_or(f64::INFINITY);
    let nm = NelderMeadConfig {
        max_iter: cfg.max_iter,
        ..NelderMeadConfig::default()
    };
    let k = order.n_params();
    let mut best = nelder_mead(objective, &vec![0.0; k], &nm);
    let mut total = best.iterations;
    if k > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let jitter = Normal::new(0.0, 0.1).expect("valid normal");
        for _ in 0..cfg.restarts {
            let start: Vec<f64> = best.x.iter().map(|v| v + jitter.sample(&mut rng)).collect();
            let run = nelder_mead(objective, &start, &nm);
            total += run.iterations;
            if run.fx < best.fx || (run.fx == best.fx && run.converged && !best.converged) {
                best = run;
            }
        }
    }
    if !best.fx.is_finite() {
        return Err(Error::NonFinite("CSS loss at every simplex vertex".into()));
    }
    if !best.converged {
        return Err(Error::NoConvergence {
            iterations: total,
            gradient_norm: gradient_norm(objective, &best.x),
        });
    }

    let coefficients = unpack(&order, &best.x, mean, sd);
    let e = residuals(&coefficients, &w, &order)?;
    let effective = w.len() - order.ar_span();
    let model = SarimaModel {
        order,
        sigma2: best.fx / effective as f64,
        level_tail: series[series.len() - order.diff_span()..].to_vec(),
        diff_tail: w[w.len() - order.ar_span()..].to_vec(),
        resid_tail: e[e.len() - order.ma_span().min(e.len())..].to_vec(),
        coefficients,
    };
    model.check_roots()?;
    Ok(model)
}

impl SarimaModel {
    /// Every AR factor stationary and every MA factor invertible.
    pub fn check_roots(&self) -> Result<()> {
        let c = &self.coefficients;
        let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<_>>();
        let factors = [
            ("AR", c.phi.clone()),
            ("seasonal AR", c.seasonal_phi.clone()),
            ("MA", neg(&c.theta)),
            ("seasonal MA", neg(&c.seasonal_theta)),
        ];
        for (name, poly) in factors {
            let modulus = min_root_modulus(&poly);
            if modulus <= 1.0 {
                return Err(Error::IllConditioned(format!(
                    "{name} polynomial has a root of modulus {modulus:.6} inside the unit circle"
                )));
            }
        }
        Ok(())
    }

    /// Forecasts of the differenced series with future residuals set to 0.
    pub fn forecast_differenced(&self, steps: usize) -> Result<Vec<f64>> {
        if steps == 0 {
            return Err(Error::Config("forecast horizon must be ≥ 1".into()));
        }
        let o = &self.order;
        let c = &self.coefficients;
        let alpha = expand_ar(&c.phi, &c.seasonal_phi, o.m.max(1));
        let beta = expand_ma(&c.theta, &c.seasonal_theta, o.m.max(1));
        if self.diff_tail.len() < alpha.len() || self.resid_tail.len() < beta.len() {
            return Err(Error::Dimension("stored tails shorter than the model lags".into()));
        }
        let mu = c.intercept;
        let mut w = self.diff_tail.clone();
        let mut e = self.resid_tail.clone();
        let mut out = Vec::with_capacity(steps);
        for _ in 0..steps {
            let mut v = mu;
            for (k, a) in alpha.iter().enumerate() {
                v += a * (w[w.len() - k - 1] - mu);
            }
            for (k, b) in beta.iter().enumerate() {
                v += b * e[e.len() - k - 1];
            }
            w.push(v);
            e.push(0.0);
            out.push(v);
        }
        Ok(out)
    }

    /// Level-scale forecasts for the next `steps` observations.
    pub fn forecast(&self, steps: usize) -> Result<Vec<f64>> {
        let diffs = self.forecast_differenced(steps)?;
        let o = &self.order;
        integrate_continuation(&self.level_tail, o.d, o.seasonal_d, o.m, &diffs)
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
    use rand_distr::StandardNormal;
    use rand::Rng;

    fn ar1_series(phi: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = vec![0.0];
        for _ in 1..n {
            let z: f64 = rng.sample(StandardNormal);
            x.push(phi * x.last().unwrap() + z);
        }
        x
    }

    #[test]
    fn recovers_ar1() {
        let y = ar1_series(0.6, 2000, 11);
        let m = fit(&y, SarimaOrder::new(1, 0, 0, 0, 0, 0, 1), &SarimaConfig::default()).unwrap();
        let phi = m.coefficients.phi[0];
        assert!((0.5..=0.7).contains(&phi), "phi = {phi}");
    }

    #[test]
    fn white_noise_mean_and_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y: Vec<f64> = (0..500).map(|_| 3.0 + rng.sample::<f64, _>(StandardNormal)).collect();
        let m = fit(&y, SarimaOrder::new(0, 0, 0, 0, 0, 0, 1), &SarimaConfig::default()).unwrap();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / y.len() as f64;
        assert!((m.coefficients.intercept - mean).abs() < 1e-6);
        assert!((m.sigma2 / var - 1.0).abs() < 0.01);
    }

    #[test]
    fn random_walk_forecast_is_flat() {
        let y = ar1_series(1.0, 50, 3);
        let m = fit(&y, SarimaOrder::new(0, 1, 0, 0, 0, 0, 1), &SarimaConfig::default()).unwrap();
        assert_eq!(m.forecast(4).unwrap(), vec![*y.last().unwrap(); 4]);
        assert!(m.forecast(0).is_err());
    }

    #[test]
    fn geometric_recursion() {
        let m = SarimaModel {
            order: SarimaOrder::new(1, 0, 0, 0, 0, 0, 1),
            coefficients: SarimaCoefficients {
                phi: vec![0.5],
                theta: vec![],
                seasonal_phi: vec![],
                seasonal_theta: vec![],
                intercept: 0.0,
            },
            sigma2: 1.0,
            level_tail: vec![],
            diff_tail: vec![1.0],
            resid_tail: vec![],
        };
        assert_eq!(m.forecast_differenced(3).unwrap(), vec![0.5, 0.25, 0.125]);
    }

    #[test]
    fn too_short_series() {
        assert!(matches!(
            fit(&[1.0, 2.0, 3.0], SarimaOrder::new(1, 1, 1, 0, 0, 0, 1), &SarimaConfig::default()),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn iteration_cap_reports_no_convergence() {
        let y = ar1_series(0.6, 300, 2);
        let cfg = SarimaConfig {
            max_iter: 2,
            restarts: 0,
            seed: 0,
        };
        let err = fit(&y, SarimaOrder::new(2, 0, 1, 0, 0, 0, 1), &cfg).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 2, .. }), "{err}");
    }
}

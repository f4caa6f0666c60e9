//! Penalized least-squares fitting of the additive model.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};

use super::{AdditiveModel, HolidayEvent, HolidaySpec, SeasonalitySpec, TrendKind, TrendSpec};
use crate::{Error, Result};

/// Relative singular-value floor below which a design is treated as singular.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Growth {
    Linear,
    Logistic { capacity: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeasonalityConfig {
    pub period: f64,
    pub terms: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolidayConfig {
    pub name: String,
    pub dates: BTreeSet<NaiveDate>,
}

/// A named exogenous column aligned with the training series.
#[derive(Debug, Clone, PartialEq)]
pub struct Regressor {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveConfig {
    pub growth: Growth,
    pub n_changepoints: usize,
    /// Fraction of the history in which changepoints are placed.
    pub changepoint_range: f64,
    pub seasonalities: Vec<SeasonalityConfig>,
    pub holidays: Vec<HolidayConfig>,
    /// L1 weight on the changepoint rate adjustments.
    pub lambda_delta: f64,
    pub max_iter: usize,
    pub tolerance: f64,
}

impl Default for AdditiveConfig {
    fn default() -> Self {
        Self {
            growth: Growth::Linear,
            n_changepoints: 25,
            changepoint_range: 0.8,
            seasonalities: vec![
                SeasonalityConfig { period: 5.0, terms: 2 },
                SeasonalityConfig { period: 252.0, terms: 10 },
            ],
            holidays: Vec::new(),
            lambda_delta: 1.0,
            max_iter: 10_000,
            tolerance: 1e-10,
        }
    }
}

impl AdditiveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.changepoint_range > 0.0 && self.changepoint_range <= 1.0) {
            return Err(Error::Config("changepoint_range must lie in (0, 1]".into()));
        }
        for s in &self.seasonalities {
            if !(s.period > 0.0 && s.period.is_finite()) || s.terms == 0 {
                return Err(Error::Config(format!(
                    "seasonality needs P > 0 and N ≥ 1 (got P={}, N={})",
                    s.period, s.terms
                )));
            }
        }
        if !(self.lambda_delta >= 0.0 && self.lambda_delta.is_finite()) {
            return Err(Error::Config("lambda_delta must be finite and ≥ 0".into()));
        }
        if let Growth::Logistic { capacity } = self.growth {
            if !(capacity > 0.0 && capacity.is_finite()) {
                return Err(Error::Config("logistic capacity must be positive".into()));
            }
        }
        if self.max_iter == 0 || !(self.tolerance > 0.0) {
            return Err(Error::Config("max_iter and tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn max_period(&self) -> f64 {
        self.seasonalities.iter().map(|s| s.period).fold(0.0, f64::max)
    }
}

/// Changepoints at evenly spaced (rounded) indices of the first
/// `range · n` bars, excluding index 0.
pub fn changepoint_grid(n: usize, count: usize, range: f64) -> Vec<f64> {
    let hist = (range * n as f64).floor() as usize;
    if count == 0 || hist < 2 {
        return Vec::new();
    }
    let count = count.min(hist - 1);
    let mut out: Vec<f64> = (1..=count)
        .map(|j| (j as f64 * (hist - 1) as f64 / count as f64).round_ties_even())
        .filter(|&s| s >= 1.0)
        .collect();
    out.dedup();
    out
}

/// Fit the model to `y` observed on `dates`, one bar per time unit.
pub fn fit(dates: &[NaiveDate], y: &[f64], regressors: &[Regressor], cfg: &AdditiveConfig) -> Result<AdditiveModel> {
    cfg.validate()?;
    let n = y.len();
    if dates.len() != n {
        return Err(Error::Dimension(format!("{} dates for {} values", dates.len(), n)));
    }
    let needed = ((2.0 * cfg.max_period()).ceil() as usize).max(3);
    if n < needed {
        return Err(Error::TooShort { needed, actual: n });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("target value".into()));
    }
    for r in regressors {
        if r.values.len() != n {
            return Err(Error::Dimension(format!(
                "regressor {} has {} values for {} bars",
                r.name,
                r.values.len(),
                n
            )));
        }
        if r.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("regressor {}", r.name)));
        }
    }

    let ts: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let changepoints = changepoint_grid(n, cfg.n_changepoints, cfg.changepoint_range);

    let mut extra: Vec<Vec<f64>> = Vec::new();
    for s in &cfg.seasonalities {
        for k in 1..=s.terms {
            let w = 2.0 * PI * k as f64 / s.period;
            extra.push(ts.iter().map(|t| (w * t).cos()).collect());
            extra.push(ts.iter().map(|t| (w * t).sin()).collect());
        }
    }
    for h in &cfg.holidays {
        extra.push(dates.iter().map(|d| if h.dates.contains(d) { 1.0 } else { 0.0 }).collect());
    }
    for r in regressors {
        extra.push(r.values.clone());
    }

    let (trend, coefs) = match cfg.growth {
        Growth::Linear => fit_linear(y, &ts, &changepoints, &extra, cfg)?,
        Growth::Logistic { capacity } => fit_logistic(y, &changepoints, &extra, capacity, cfg)?,
    };

    let mut it = coefs.into_iter();
    let seasonalities = cfg
        .seasonalities
        .iter()
        .map(|s| {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for _ in 0..s.terms {
                a.push(it.next().unwrap_or(0.0));
                b.push(it.next().unwrap_or(0.0));
            }
            SeasonalitySpec { period: s.period, a, b }
        })
        .collect();
    let holidays = HolidaySpec {
        events: cfg
            .holidays
            .iter()
            .map(|h| HolidayEvent {
                name: h.name.clone(),
                beta: it.next().unwrap_or(0.0),
                dates: h.dates.clone(),
            })
            .collect(),
    };
    let exogenous_coefs: Vec<f64> = it.collect();

    let mut model = AdditiveModel {
        trend,
        seasonalities,
        holidays,
        exogenous_names: regressors.iter().map(|r| r.name.clone()).collect(),
        exogenous_coefs,
        residual_sigma: 0.0,
        origin: dates[0],
        history_len: n,
        last_date: dates[n - 1],
    };
    let rows: Vec<Vec<f64>> = (0..n).map(|i| regressors.iter().map(|r| r.values[i]).collect()).collect();
    let fitted = model.values_from(0, dates, Some(&rows))?;
    let resid: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let mean = resid.iter().sum::<f64>() / n as f64;
    let var = resid.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n as f64;
    model.residual_sigma = var.sqrt();
    if !model.residual_sigma.is_finite() {
        return Err(Error::NonFinite("residuals".into()));
    }
    Ok(model)
}

/// Column-normalized block with all-zero columns dropped.
struct Block {
    matrix: DMatrix<f64>,
    norms: Vec<f64>,
    /// Position of each original column in `matrix`, if kept.
    kept: Vec<Option<usize>>,
}

impl Block {
    fn new(n: usize, cols: &[&[f64]]) -> Self {
        let mut norms = Vec::new();
        let mut kept = Vec::new();
        let mut data = Vec::new();
        for c in cols {
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                kept.push(Some(norms.len()));
                norms.push(norm);
                data.extend(c.iter().map(|v| v / norm));
            } else {
                kept.push(None);
            }
        }
        Self {
            matrix: DMatrix::from_column_slice(n, norms.len(), &data),
            norms,
            kept,
        }
    }

    /// Map coefficients of the normalized columns back to the originals.
    fn unscale(&self, scaled: &[f64]) -> Vec<f64> {
        self.kept
            .iter()
            .map(|k| k.map_or(0.0, |j| scaled[j] / self.norms[j]))
            .collect()
    }
}

/// Thin SVD of a full-column-rank design.
struct Basis {
    q: DMatrix<f64>,
    vt: DMatrix<f64>,
    sigma: DVector<f64>,
}

impl Basis {
    fn new(m: &DMatrix<f64>) -> Result<Self> {
        let (n, p) = m.shape();
        if p > n {
            return Err(Error::IllConditioned(format!("{p} design columns for {n} observations")));
        }
        let svd = m.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > RANK_TOL * smax) {
            return Err(Error::IllConditioned(format!(
                "design matrix is singular (singular values {smax:.3e} .. {smin:.3e})"
            )));
        }
        Ok(Self {
            q: svd.u.expect("requested U"),
            vt: svd.v_t.expect("requested Vt"),
            sigma: svd.singular_values,
        })
    }

    fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.q * self.q.tr_mul(x)
    }

    fn project_matrix(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        &self.q * self.q.tr_mul(x)
    }

    fn solve(&self, x: &DVector<f64>) -> DVector<f64> {
        let z = self.q.tr_mul(x).component_div(&self.sigma);
        self.vt.tr_mul(&z)
    }
}

fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

fn fit_linear(
    y: &[f64],
    ts: &[f64],
    changepoints: &[f64],
    extra: &[Vec<f64>],
    cfg: &AdditiveConfig,
) -> Result<(TrendSpec, Vec<f64>)> {
    let n = y.len();
    let ones = vec![1.0; n];
    let ramps: Vec<Vec<f64>> = changepoints
        .iter()
        .map(|&s| ts.iter().map(|&t| (t - s).max(0.0)).collect())
        .collect();
    let yv = DVector::from_column_slice(y);

    let mut ucols: Vec<&[f64]> = vec![&ones, ts];
    ucols.extend(extra.iter().map(Vec::as_slice));
    let ublock = Block::new(n, &ucols);
    let dcols: Vec<&[f64]> = ramps.iter().map(Vec::as_slice).collect();
    let dblock = Block::new(n, &dcols);

    let (u_scaled, d_scaled) = if cfg.lambda_delta == 0.0 || dblock.norms.is_empty() {
        let full = DMatrix::from_fn(n, ublock.norms.len() + dblock.norms.len(), |i, j| {
            if j < ublock.norms.len() {
                ublock.matrix[(i, j)]
            } else {
                dblock.matrix[(i, j - ublock.norms.len())]
            }
        });
        let beta = Basis::new(&full)?.solve(&yv);
        let split = ublock.norms.len();
        (beta.as_slice()[..split].to_vec(), beta.as_slice()[split..].to_vec())
    } else {
        let basis = Basis::new(&ublock.matrix)?;
        let d = &dblock.matrix;
        let d_perp = d - basis.project_matrix(d);
        let y_perp = &yv - basis.project(&yv);
        let gram = d_perp.tr_mul(&d_perp);
        let c = d_perp.tr_mul(&y_perp);
        let delta = lasso_cd(&gram, &c, &dblock.norms, cfg.lambda_delta, cfg.max_iter, cfg.tolerance);
        let dv = DVector::from_column_slice(&delta);
        let beta = basis.solve(&(&yv - d * dv));
        (beta.as_slice().to_vec(), delta)
    };

    let ucoef = ublock.unscale(&u_scaled);
    let deltas = dblock.unscale(&d_scaled);
    let trend = TrendSpec::linear(ucoef[1], ucoef[0], changepoints.to_vec(), deltas)?;
    Ok((trend, ucoef[2..].to_vec()))
}

/// Coordinate descent for `‖ỹ − D̃δ‖² + λ Σ |δ_j| / norm_j` given the Gram
/// matrix `D̃ᵀD̃` and `D̃ᵀỹ` of the normalized ramp columns.
fn lasso_cd(gram: &DMatrix<f64>, c: &DVector<f64>, norms: &[f64], lambda: f64, max_iter: usize, tol: f64) -> Vec<f64> {
    let p = c.len();
    let mut delta = vec![0.0; p];
    for sweep in 0..max_iter {
        let mut max_change: f64 = 0.0;
        let mut max_abs: f64 = 0.0;
        for j in 0..p {
            let gjj = gram[(j, j)];
            let new = if gjj <= 1e-14 {
                0.0
            } else {
                let rho = c[j] - (0..p).filter(|&l| l != j).map(|l| gram[(j, l)] * delta[l]).sum::<f64>();
                soft_threshold(rho, lambda / (2.0 * norms[j])) / gjj
            };
            max_change = max_change.max((new - delta[j]).abs());
            max_abs = max_abs.max(new.abs());
            delta[j] = new;
        }
        if max_change <= tol * (1.0 + max_abs) {
            return delta;
        }
        if sweep + 1 == max_iter {
            log::warn!("changepoint coordinate descent stopped after {max_iter} sweeps (last change {max_change:.3e})");
        }
    }
    delta
}

/// Logistic trend parameters in scaled units (`τ = t / scale`, `y / C`).
struct LogisticProblem<'a> {
    tau: Vec<f64>,
    y: DVector<f64>,
    changepoints: Vec<f64>,
    segment: Vec<usize>,
    basis: Option<&'a Basis>,
    lambda: f64,
}

impl LogisticProblem<'_> {
    /// Rates and offsets of each segment plus their derivatives with respect
    /// to `θ = (k, m, δ_1..δ_J)`.
    fn segments(&self, theta: &[f64], with_grad: bool) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let dim = theta.len();
        let j = self.changepoints.len();
        let mut rate = vec![theta[0]];
        let mut off = vec![theta[1]];
        let mut drate = Vec::new();
        let mut doff = Vec::new();
        if with_grad {
            let mut e0 = vec![0.0; dim];
            e0[0] = 1.0;
            let mut e1 = vec![0.0; dim];
            e1[1] = 1.0;
            drate.push(e0);
            doff.push(e1);
        }
        for i in 0..j {
            let r = rate[i];
            let next = r + theta[2 + i];
            let s = self.changepoints[i];
            let o = off[i];
            let gamma = if next.abs() < 1e-300 { 0.0 } else { (s - o) * (1.0 - r / next) };
            rate.push(next);
            off.push(o + gamma);
            if with_grad {
                let mut dnext = drate[i].clone();
                dnext[2 + i] += 1.0;
                let mut dg = vec![0.0; dim];
                if next.abs() >= 1e-300 {
                    for q in 0..dim {
                        dg[q] = -doff[i][q] * (1.0 - r / next)
                            + (s - o) * (-drate[i][q] / next + r * dnext[q] / (next * next));
                    }
                }
                let dnew: Vec<f64> = doff[i].iter().zip(&dg).map(|(a, b)| a + b).collect();
                drate.push(dnext);
                doff.push(dnew);
            }
        }
        (rate, off, drate, doff)
    }

    fn residual(&self, g: &[f64]) -> DVector<f64> {
        let r = &self.y - DVector::from_column_slice(g);
        match self.basis {
            Some(b) => &r - b.project(&r),
            None => r,
        }
    }

    fn curve(&self, rate: &[f64], off: &[f64]) -> Vec<f64> {
        self.tau
            .iter()
            .zip(&self.segment)
            .map(|(&t, &s)| 1.0 / (1.0 + (-rate[s] * (t - off[s])).exp()))
            .collect()
    }

    fn smooth(&self, theta: &[f64]) -> f64 {
        let (rate, off, _, _) = self.segments(theta, false);
        self.residual(&self.curve(&rate, &off)).norm_squared()
    }

    fn smooth_and_grad(&self, theta: &[f64]) -> (f64, Vec<f64>) {
        let (rate, off, drate, doff) = self.segments(theta, true);
        let g = self.curve(&rate, &off);
        let e = self.residual(&g);
        let mut grad = vec![0.0; theta.len()];
        for (i, (&t, &s)) in self.tau.iter().zip(&self.segment).enumerate() {
            let w = -2.0 * e[i] * g[i] * (1.0 - g[i]);
            let a = t - off[s];
            for q in 0..grad.len() {
                grad[q] += w * (a * drate[s][q] - rate[s] * doff[s][q]);
            }
        }
        (e.norm_squared(), grad)
    }

    fn penalty(&self, theta: &[f64]) -> f64 {
        self.lambda * theta[2..].iter().map(|d| d.abs()).sum::<f64>()
    }
}

fn fit_logistic(
    y: &[f64],
    changepoints: &[f64],
    extra: &[Vec<f64>],
    capacity: f64,
    cfg: &AdditiveConfig,
) -> Result<(TrendSpec, Vec<f64>)> {
    let n = y.len();
    let scale = (n - 1).max(1) as f64;
    let cols: Vec<&[f64]> = extra.iter().map(Vec::as_slice).collect();
    let block = Block::new(n, &cols);
    let basis = if block.norms.is_empty() {
        None
    } else {
        Some(Basis::new(&block.matrix)?)
    };
    let tau: Vec<f64> = (0..n).map(|i| i as f64 / scale).collect();
    let cps: Vec<f64> = changepoints.iter().map(|s| s / scale).collect();
    let segment = tau.iter().map(|&t| cps.iter().filter(|&&s| t >= s).count()).collect();
    let problem = LogisticProblem {
        tau: tau.clone(),
        y: DVector::from_iterator(n, y.iter().map(|v| v / capacity)),
        changepoints: cps.clone(),
        segment,
        basis: basis.as_ref(),
        lambda: cfg.lambda_delta / (capacity * capacity * scale),
    };

    // Start from a straight-line fit of the logit of the scaled target.
    let logits: Vec<f64> = problem
        .y
        .iter()
        .map(|v| {
            let p = v.clamp(0.01, 0.99);
            (p / (1.0 - p)).ln()
        })
        .collect();
    let tbar = tau.iter().sum::<f64>() / n as f64;
    let lbar = logits.iter().sum::<f64>() / n as f64;
    let sxy: f64 = tau.iter().zip(&logits).map(|(t, l)| (t - tbar) * (l - lbar)).sum();
    let sxx: f64 = tau.iter().map(|t| (t - tbar).powi(2)).sum();
    let mut k0 = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    if k0.abs() < 1e-2 {
        k0 = 1e-2;
    }
    let b0 = lbar - k0 * tbar;
    let mut theta = vec![0.0; 2 + cps.len()];
    theta[0] = k0;
    theta[1] = -b0 / k0;

    // Accelerated proximal gradient with backtracking and adaptive restart.
    let mut step = 1.0;
    let mut current = problem.smooth(&theta) + problem.penalty(&theta);
    let mut look = theta.clone();
    let mut momentum = 1.0f64;
    for _ in 0..cfg.max_iter {
        let (f, grad) = problem.smooth_and_grad(&look);
        let mut accepted = None;
        while step > 1e-18 {
            let cand: Vec<f64> = look
                .iter()
                .zip(&grad)
                .enumerate()
                .map(|(q, (x, g))| {
                    let v = x - step * g;
                    if q >= 2 {
                        soft_threshold(v, step * problem.lambda)
                    } else {
                        v
                    }
                })
                .collect();
            let fc = problem.smooth(&cand);
            let mut lin = 0.0;
            let mut sq = 0.0;
            for q in 0..look.len() {
                let d = cand[q] - look[q];
                lin += grad[q] * d;
                sq += d * d;
            }
            if fc.is_finite() && fc <= f + lin + sq / (2.0 * step) {
                accepted = Some((cand, fc));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, fc)) = accepted else { break };
        let next = fc + problem.penalty(&cand);
        if next > current && momentum > 1.0 {
            look = theta.clone();
            momentum = 1.0;
            continue;
        }
        let change = theta.iter().zip(&cand).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let size = cand.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let following = (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt()) / 2.0;
        look = cand
            .iter()
            .zip(&theta)
            .map(|(c, p)| c + (momentum - 1.0) / following * (c - p))
            .collect();
        momentum = following;
        theta = cand;
        current = next;
        if change <= cfg.tolerance * (1.0 + size) {
            break;
        }
    }
    let (rate, off, _, _) = problem.segments(&theta, false);
    let g = problem.curve(&rate, &off);
    let coefs = match &basis {
        Some(b) => {
            let r = &problem.y - DVector::from_column_slice(&g);
            let scaled: Vec<f64> = b.solve(&r).iter().map(|v| v * capacity).collect();
            block.unscale(&scaled)
        }
        None => Vec::new(),
    };
    let trend = TrendSpec::new(
        TrendKind::Logistic { capacity },
        theta[0] / scale,
        theta[1] * scale,
        changepoints.to_vec(),
        theta[2..].iter().map(|d| d / scale).collect(),
    )?;
    Ok((trend, coefs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::additive::eval_trend;

    fn dates(n: usize) -> Vec<NaiveDate> {
        let start = NaiveDate::from_ymd_opt(2020, 1, 6).unwrap();
        crate::market_data::next_trading_days(start.pred_opt().unwrap(), n)
    }

    fn cfg(seasonalities: Vec<SeasonalityConfig>, n_changepoints: usize, lambda_delta: f64) -> AdditiveConfig {
        AdditiveConfig {
            seasonalities,
            n_changepoints,
            lambda_delta,
            ..AdditiveConfig::default()
        }
    }

    #[test]
    fn grid_matches_uniform_rounding() {
        let g = changepoint_grid(314, 25, 0.8);
        assert_eq!(g.len(), 25);
        assert_eq!(g[9], 100.0);
        assert_eq!(g[0], 10.0);
        assert!(changepoint_grid(2, 25, 0.8).is_empty());
    }

    #[test]
    fn recovers_line_plus_cosine() {
        let n = 200;
        let y: Vec<f64> = (0..n)
            .map(|t| 0.5 * t as f64 + 3.0 + 2.0 * (2.0 * PI * t as f64 / 20.0).cos())
            .collect();
        let m = fit(&dates(n), &y, &[], &cfg(vec![SeasonalityConfig { period: 20.0, terms: 1 }], 0, 0.0)).unwrap();
        assert!((m.trend.k - 0.5).abs() < 0.005);
        assert!((m.trend.m - 3.0).abs() < 0.03);
        assert!((m.seasonalities[0].a[0] - 2.0).abs() < 0.02);
        assert!(m.seasonalities[0].b[0].abs() < 0.02);
    }

    #[test]
    fn flat_series() {
        let n = 50;
        let m = fit(&dates(n), &vec![7.0; n], &[], &cfg(vec![], 0, 0.0)).unwrap();
        assert!(m.trend.k.abs() < 1e-6);
        assert!((m.trend.m - 7.0).abs() < 1e-9);
        assert!(m.residual_sigma < 1e-9);
    }

    #[test]
    fn slope_change_recovered() {
        let n = 314;
        let y: Vec<f64> = (0..n)
            .map(|t| {
                let t = t as f64;
                if t <= 100.0 {
                    t
                } else {
                    100.0 + 2.0 * (t - 100.0)
                }
            })
            .collect();
        let m = fit(&dates(n), &y, &[], &cfg(vec![], 25, 0.01)).unwrap();
        let sum: f64 = m
            .trend
            .changepoints
            .iter()
            .zip(&m.trend.deltas)
            .filter(|(s, _)| **s <= 100.0)
            .map(|(_, d)| d)
            .sum();
        assert!((sum - 1.0).abs() < 0.15, "sum of early deltas {sum}");
    }

    #[test]
    fn too_short_and_aliased() {
        let y = vec![1.0; 9];
        let err = fit(&dates(9), &y, &[], &cfg(vec![SeasonalityConfig { period: 5.0, terms: 2 }], 0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::TooShort { needed: 10, actual: 9 }));
        let y: Vec<f64> = (0..60).map(|t| t as f64).collect();
        let err = fit(&dates(60), &y, &[], &cfg(vec![SeasonalityConfig { period: 5.0, terms: 3 }], 0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::IllConditioned(_)), "{err}");
    }

    #[test]
    fn exogenous_coefficient_recovered() {
        let n = 120;
        let x: Vec<f64> = (0..n).map(|t| ((t * 37 % 11) as f64 - 5.0) / 5.0).collect();
        let y: Vec<f64> = (0..n).map(|t| 10.0 + 0.1 * t as f64 + 3.0 * x[t]).collect();
        let reg = Regressor {
            name: "sentiment".into(),
            values: x,
        };
        let m = fit(&dates(n), &y, &[reg], &cfg(vec![], 5, 0.5)).unwrap();
        assert!((m.exogenous_coefs[0] - 3.0).abs() < 1e-3);
    }

    #[test]
    fn logistic_recovers_curve() {
        let n = 300;
        let truth = TrendSpec::logistic(100.0, 0.04, 150.0, vec![], vec![]).unwrap();
        let y: Vec<f64> = (0..n).map(|t| eval_trend(t as f64, &truth)).collect();
        let mut c = cfg(vec![], 0, 0.0);
        c.growth = Growth::Logistic { capacity: 100.0 };
        let m = fit(&dates(n), &y, &[], &c).unwrap();
        assert!((m.trend.k - 0.04).abs() < 1e-3, "k = {}", m.trend.k);
        assert!((m.trend.m - 150.0).abs() < 0.5, "m = {}", m.trend.m);
        assert!(m.residual_sigma < 0.05, "sigma {} k {} m {}", m.residual_sigma, m.trend.k, m.trend.m);
    }

    #[test]
    fn deterministic() {
        let n = 300;
        let y: Vec<f64> = (0..n).map(|t| (t as f64 * 0.3).sin() * 3.0 + t as f64 * 0.05).collect();
        let c = cfg(vec![SeasonalityConfig { period: 5.0, terms: 2 }], 10, 1.0);
        assert_eq!(fit(&dates(n), &y, &[], &c).unwrap(), fit(&dates(n), &y, &[], &c).unwrap());
    }
}

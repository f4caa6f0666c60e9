//! One-parameter-at-a-time hyperparameter search with a full-grid baseline.
//!
//! Stepwise search walks the parameters in declaration order, tries every
//! candidate of the current parameter with earlier choices frozen and later
//! ones at their defaults, and freezes the best. It costs `Σ|h_i|`
//! evaluations where a grid costs `Π|h_i|`.

use std::fmt::Write as _;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub candidates: Vec<f64>,
    pub default: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    params: Vec<Param>,
}

impl SearchSpace {
    pub fn new(params: Vec<Param>) -> Result<Self> {
        for (i, p) in params.iter().enumerate() {
            if p.candidates.is_empty() {
                return Err(Error::Config(format!("parameter {} has no candidates", p.name)));
            }
            if !p.candidates.contains(&p.default) {
                return Err(Error::Config(format!(
                    "default {} of {} is not among its candidates",
                    p.default, p.name
                )));
            }
            if params[..i].iter().any(|q| q.name == p.name) {
                return Err(Error::Config(format!("duplicate parameter {}", p.name)));
            }
        }
        Ok(Self { params })
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn defaults(&self) -> Vec<f64> {
        self.params.iter().map(|p| p.default).collect()
    }

    pub fn stepwise_count(&self) -> usize {
        self.params.iter().map(|p| p.candidates.len()).sum()
    }

    pub fn grid_count(&self) -> usize {
        self.params
            .iter()
            .map(|p| p.candidates.len())
            .try_fold(1usize, |acc, n| acc.checked_mul(n))
            .unwrap_or(usize::MAX)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub index: usize,
    /// Values aligned with the search space parameters.
    pub config: Vec<f64>,
    /// `+∞` for failed trials.
    pub objective: f64,
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialLog {
    pub names: Vec<String>,
    pub trials: Vec<Trial>,
    pub best_config: Vec<f64>,
    pub best_value: f64,
}

impl TrialLog {
    fn new(space: &SearchSpace) -> Self {
        Self {
            names: space.params.iter().map(|p| p.name.clone()).collect(),
            trials: Vec::new(),
            best_config: space.defaults(),
            best_value: f64::INFINITY,
        }
    }

    fn record(&mut self, config: Vec<f64>, value: f64) -> f64 {
        let failed = !value.is_finite();
        let objective = if failed { f64::INFINITY } else { value };
        if failed {
            log::warn!("trial {} returned a non-finite objective", self.trials.len());
        }
        if objective < self.best_value || self.trials.is_empty() {
            self.best_value = objective;
            self.best_config = config.clone();
        }
        self.trials.push(Trial {
            index: self.trials.len(),
            config,
            objective,
            failed,
        });
        objective
    }

    /// `eval_index,<param…>,objective`; failed trials show `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("eval_index,{},objective\n", self.names.join(","));
        for t in &self.trials {
            let values: Vec<String> = t.config.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{},{},{}", t.index, values.join(","), t.objective);
        }
        out
    }
}

/// Stepwise search; ties go to the earliest candidate.
pub fn stepwise_optimize(mut objective: impl FnMut(&[f64]) -> f64, space: &SearchSpace) -> TrialLog {
    let mut log = TrialLog::new(space);
    let mut current = space.defaults();
    for (i, p) in space.params.iter().enumerate() {
        let mut best: Option<(f64, f64)> = None;
        for &candidate in &p.candidates {
            let mut config = current.clone();
            config[i] = candidate;
            let value = log.record(config.clone(), objective(&config));
            if best.is_none_or(|(v, _)| value < v) {
                best = Some((value, candidate));
            }
        }
        if let Some((_, c)) = best {
            current[i] = c;
        }
    }
    log
}

/// Exhaustive search over the Cartesian product, refusing to start when it
/// would exceed `budget` evaluations. Enumeration is lexicographic in
/// candidate order, so ties go to the lexicographically first config.
pub fn grid_optimize(mut objective: impl FnMut(&[f64]) -> f64, space: &SearchSpace, budget: usize) -> Result<TrialLog> {
    let needed = space.grid_count();
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut log = TrialLog::new(space);
    let mut idx = vec![0usize; space.params.len()];
    loop {
        let config: Vec<f64> = idx.iter().zip(&space.params).map(|(&i, p)| p.candidates[i]).collect();
        log.record(config.clone(), objective(&config));
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return Ok(log);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < space.params[pos].candidates.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

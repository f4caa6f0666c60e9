use stockcast::evaluation::{build_report, ReportMetadata};
use stockcast::market_data::OhlcvSeries;
use stockcast::sentiment::SentimentSeries;
use stockcast::tuner::{grid_optimize, stepwise_optimize, Param, SearchSpace};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{write_atomic, Workspace};

/// `cfg` restricted to the tuned model with `values` applied to the tuned
/// keys.
fn candidate(cfg: &RunConfig, keys: &[String], values: &[f64]) -> Result<RunConfig, CliError> {
    let mut c = cfg.clone();
    c.tune_space.clear();
    c.set("models", cfg.get("tune.model"))?;
    for (k, v) in keys.iter().zip(values) {
        c.set(k, &v.to_string())?;
    }
    Ok(c)
}

/// Backtest RMSE of the tuned model, averaged over folds and then symbols.
/// Any failure scores +∞.
fn objective(cfg: &RunConfig, series: &[OhlcvSeries], sentiment: Option<&SentimentSeries>) -> f64 {
    let model = cfg.get("tune.model");
    let score = || -> Result<Option<f64>, CliError> {
        let spec = cfg.model_spec(model)?;
        let (runs, failures) = super::backtest::evaluate(cfg, series, &[spec], sentiment)?;
        if !failures.is_empty() {
            return Ok(None);
        }
        let report = build_report(&runs, &failures, ReportMetadata::new("", 0, &[]))?;
        Ok(super::backtest::mean_average(&report, model))
    };
    match score() {
        Ok(Some(v)) if v.is_finite() => v,
        Ok(_) => f64::INFINITY,
        Err(e) => {
            log::warn!("candidate rejected: {e}");
            f64::INFINITY
        }
    }
}

pub fn run(cfg: &RunConfig, ws: &Workspace, grid: bool) -> Result<(), CliError> {
    if cfg.tune_space.is_empty() {
        return Err(CliError::Config("no tune.<key> candidate lists in the config".into()));
    }
    let series = super::load_series(ws)?;
    let sentiment = super::load_sentiment(cfg)?;
    let keys: Vec<String> = cfg.tune_space.keys().cloned().collect();
    let params = cfg
        .tune_space
        .iter()
        .map(|(k, c)| {
            let current = cfg.get(k).parse::<f64>().ok().filter(|v| c.contains(v));
            Param {
                name: k.clone(),
                candidates: c.clone(),
                default: current.unwrap_or(c[0]),
            }
        })
        .collect();
    let space = SearchSpace::new(params)?;
    let mut eval = |values: &[f64]| match candidate(cfg, &keys, values) {
        Ok(c) => objective(&c, &series, sentiment.as_ref()),
        Err(e) => {
            log::warn!("candidate {values:?} rejected: {e}");
            f64::INFINITY
        }
    };
    let log = if grid {
        grid_optimize(&mut eval, &space, cfg.tune_budget())?
    } else {
        stepwise_optimize(&mut eval, &space)
    };
    write_atomic(&ws.tune_dir().join("trials.csv"), log.to_csv().as_bytes())?;
    super::write_resolved(cfg, ws, "tune")?;
    if !log.best_value.is_finite() {
        return Err(CliError::Failed(format!("all {} candidates failed", log.trials.len())));
    }
    let best = candidate(cfg, &keys, &log.best_config)?;
    write_atomic(&ws.tune_dir().join("best.conf"), best.resolved_text().as_bytes())?;
    println!("{} evaluations; best mean RMSE {}", log.trials.len(), log.best_value);
    for (k, v) in keys.iter().zip(&log.best_config) {
        println!("  {k} = {v}");
    }
    Ok(())
}

use rayon::prelude::*;
use stockcast::evaluation::{build_report, run_fold, ComparisonReport, FoldFailure, ForecastRun, ModelSpec, ReportMetadata};
use stockcast::market_data::{rolling_splits, Fold, OhlcvSeries};
use stockcast::sentiment::SentimentSeries;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{write_atomic, Workspace};
use crate::plot::Plot;

/// Runs every (series, model, fold) job in parallel. Results come back in
/// job order, so the outcome does not depend on scheduling.
pub fn evaluate(
    cfg: &RunConfig,
    series: &[OhlcvSeries],
    specs: &[ModelSpec],
    sentiment: Option<&SentimentSeries>,
) -> Result<(Vec<ForecastRun>, Vec<FoldFailure>), CliError> {
    let mut jobs: Vec<(&OhlcvSeries, &ModelSpec, Fold)> = Vec::new();
    for s in series {
        let folds = rolling_splits(s.len(), cfg.fold_count(), cfg.test_len())?;
        for spec in specs {
            for fold in folds.iter() {
                jobs.push((s, spec, fold.clone()));
            }
        }
    }
    let results: Vec<_> = jobs
        .par_iter()
        .map(|(s, spec, fold)| (s, spec, fold, run_fold(spec, s, fold, sentiment)))
        .collect();
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for (s, spec, fold, r) in results {
        match r {
            Ok(run) => runs.push(run),
            Err(e) => {
                log::warn!("{} fold {} on {}: {e}", spec.name(), fold.index, s.symbol);
                failures.push(FoldFailure {
                    model: spec.name().to_string(),
                    symbol: s.symbol.clone(),
                    fold: fold.index,
                    kind: e.kind(),
                    message: e.to_string(),
                });
            }
        }
    }
    Ok((runs, failures))
}

pub fn run(cfg: &RunConfig, ws: &Workspace) -> Result<(), CliError> {
    let series = super::load_series(ws)?;
    let sentiment = super::load_sentiment(cfg)?;
    let specs = cfg.model_specs()?;
    let (runs, failures) = evaluate(cfg, &series, &specs, sentiment.as_ref())?;

    let refs: Vec<&OhlcvSeries> = series.iter().collect();
    let report = build_report(&runs, &failures, ReportMetadata::new(&cfg.resolved_text(), cfg.seed(), &refs))?;
    write_atomic(&ws.report_json(), report.to_json().as_bytes())?;
    write_atomic(&ws.report_csv(), report.to_csv().as_bytes())?;
    if cfg.plots() {
        for r in runs.iter().filter(|r| r.model != stockcast::evaluation::BASELINE_MODEL) {
            let plot = Plot {
                title: format!("{} {} fold {}", r.symbol, r.model, r.fold),
                dates: &r.dates,
                actual: Some(&r.actual),
                predicted: &r.predicted,
                band: r.band.as_ref(),
            };
            let stem = format!("{}_{}_fold{}", r.model, r.symbol, r.fold);
            write_atomic(&ws.plots_dir().join(format!("{stem}.svg")), plot.svg().as_bytes())?;
            write_atomic(&ws.plots_dir().join(format!("{stem}.csv")), plot.points_csv().as_bytes())?;
        }
    }
    super::write_resolved(cfg, ws, "backtest")?;
    print!("{}", super::report::table(&report));

    if failures.is_empty() {
        Ok(())
    } else {
        for f in &failures {
            eprintln!("{} fold {} on {}: {}", f.model, f.fold, f.symbol, f.message);
        }
        Err(CliError::Failed(format!("{} of {} folds failed", failures.len(), runs.len() + failures.len())))
    }
}

/// Mean over symbols of a model's global-average RMSE; `None` when any
/// fold failed.
pub fn mean_average(report: &ComparisonReport, model: &str) -> Option<f64> {
    let cells: Vec<f64> = report
        .symbols
        .iter()
        .map(|s| report.cell(model, s).and_then(|c| c.average))
        .collect::<Option<_>>()?;
    (!cells.is_empty()).then(|| cells.iter().sum::<f64>() / cells.len() as f64)
}

use rayon::prelude::*;
use stockcast::boosting::fit_hybrid;
use stockcast::evaluation::ModelSpec;
use stockcast::lstm::LstmForecaster;
use stockcast::market_data::OhlcvSeries;
use stockcast::sarima;
use stockcast::sentiment::{align_sentiment, SentimentSeries};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{write_atomic, Workspace};

/// Fits one model on the whole series and returns its saved text.
fn fit_text(spec: &ModelSpec, series: &OhlcvSeries, sentiment: Option<&SentimentSeries>) -> Result<Option<String>, CliError> {
    let aligned = sentiment.map(|s| align_sentiment(&series.dates(), s));
    Ok(match spec {
        ModelSpec::Persistence => None,
        ModelSpec::Lstm { spec, .. } => {
            let s = if spec.use_sentiment { aligned.as_deref() } else { None };
            Some(LstmForecaster::fit(series, s, spec)?.save())
        }
        ModelSpec::AdditiveBoost {
            additive, boost, lags, ..
        } => Some(fit_hybrid(&series.dates(), &series.closes(), aligned.as_deref(), additive, boost, lags)?.save()),
        ModelSpec::Sarima { order, config } => Some(sarima::fit(&series.closes(), *order, config)?.save()),
    })
}

pub fn run(cfg: &RunConfig, ws: &Workspace) -> Result<(), CliError> {
    let series = super::load_series(ws)?;
    let sentiment = super::load_sentiment(cfg)?;
    let specs = cfg.model_specs()?;
    let jobs: Vec<(&OhlcvSeries, &ModelSpec)> = series
        .iter()
        .flat_map(|s| specs.iter().filter(|m| !matches!(m, ModelSpec::Persistence)).map(move |m| (s, m)))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|(s, m)| (s, m, fit_text(m, s, sentiment.as_ref())))
        .collect();
    let mut failed = 0;
    for (s, m, r) in results {
        match r {
            Ok(Some(text)) => {
                let path = ws.model_file(m.name(), &s.symbol);
                write_atomic(&path, text.as_bytes())?;
                println!("{} {}: {}", s.symbol, m.name(), path.display());
            }
            Ok(None) => {}
            Err(e) => {
                eprintln!("{} {}: {e}", s.symbol, m.name());
                failed += 1;
            }
        }
    }
    super::write_resolved(cfg, ws, "train")?;
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} of {} fits failed", jobs.len())));
    }
    Ok(())
}

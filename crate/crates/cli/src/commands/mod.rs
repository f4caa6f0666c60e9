pub mod backtest;
pub mod forecast;
pub mod ingest;
pub mod report;
pub mod sentiment;
pub mod train;
pub mod tune;

use stockcast::market_data::{parse_csv, OhlcvSeries};
use stockcast::sentiment::SentimentSeries;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{read_text, write_atomic, Workspace};

/// Every ingested series, ordered by symbol.
pub fn load_series(ws: &Workspace) -> Result<Vec<OhlcvSeries>, CliError> {
    let symbols = ws.ingested_symbols()?;
    if symbols.is_empty() {
        return Err(CliError::Data(format!(
            "no ingested series under {}; run `stockcast ingest` first",
            ws.series_dir().display()
        )));
    }
    symbols
        .iter()
        .map(|s| {
            let text = read_text(&ws.series_file(s))?;
            Ok(parse_csv(text.as_bytes(), s)?)
        })
        .collect()
}

/// The daily scores named by `sentiment.series`, if any.
pub fn load_sentiment(cfg: &RunConfig) -> Result<Option<SentimentSeries>, CliError> {
    cfg.path("sentiment.series")
        .map(|p| Ok(SentimentSeries::from_csv(&read_text(&p)?)?))
        .transpose()
}

pub fn write_resolved(cfg: &RunConfig, ws: &Workspace, command: &str) -> Result<(), CliError> {
    write_atomic(&ws.resolved_config(command), cfg.resolved_text().as_bytes())
}

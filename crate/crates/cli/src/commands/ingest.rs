use std::path::{Path, PathBuf};

use stockcast::market_data::{parse_csv, serialize_csv, OhlcvSeries};
use stockcast::Error;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{read_text, write_atomic, Workspace};

pub fn run(
    cfg: &RunConfig,
    ws: &Workspace,
    files: &[PathBuf],
    from_url: Option<&str>,
    symbols: &[String],
) -> Result<(), CliError> {
    let symbols: Vec<String> = if symbols.is_empty() { cfg.data_symbols() } else { symbols.to_vec() };
    let url = from_url.map(str::to_string).or_else(|| {
        let u = cfg.get("data.url");
        (files.is_empty() && cfg.data_files().is_empty() && !u.is_empty()).then(|| u.to_string())
    });
    let series = match url {
        Some(template) => fetch_all(cfg, &template, &symbols)?,
        None => {
            let files = if files.is_empty() { cfg.data_files() } else { files.to_vec() };
            if files.is_empty() {
                return Err(CliError::Config("nothing to ingest: give CSV files, --from-url, data.files or data.url".into()));
            }
            if !symbols.is_empty() && symbols.len() != files.len() {
                return Err(CliError::Config(format!("{} symbols for {} files", symbols.len(), files.len())));
            }
            files
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let symbol = symbols.get(i).cloned().unwrap_or_else(|| stem(f));
                    read_file(f, &symbol)
                })
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    for s in &series {
        write_atomic(&ws.series_file(&s.symbol), serialize_csv(s).as_bytes())?;
        let (first, last) = (s.bars.first().map(|b| b.date), s.bars.last().map(|b| b.date));
        match (first, last) {
            (Some(a), Some(b)) => println!("{}: {} bars, {a} to {b}", s.symbol, s.len()),
            _ => println!("{}: 0 bars", s.symbol),
        }
    }
    super::write_resolved(cfg, ws, "ingest")
}

fn stem(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("series").to_string()
}

fn read_file(path: &Path, symbol: &str) -> Result<OhlcvSeries, CliError> {
    let text = read_text(path)?;
    parse_csv(text.as_bytes(), symbol).map_err(|e| located(e, &path.display().to_string(), &text))
}

/// Prints the offending input line for row-level errors.
fn located(e: Error, source: &str, text: &str) -> CliError {
    if let Error::MalformedRow { line, .. } | Error::NonMonotoneDates { line, .. } = &e {
        if let Some(content) = text.lines().nth(*line as usize - 1) {
            eprintln!("{source}:{line}: {content}");
        }
    }
    if let Error::InvalidBar { date, .. } = &e {
        let needle = date.to_string();
        if let Some((no, content)) = text.lines().enumerate().find(|(_, l)| l.starts_with(&needle)) {
            eprintln!("{source}:{}: {content}", no + 1);
        }
    }
    e.into()
}

#[cfg(feature = "fetch")]
fn fetch_all(cfg: &RunConfig, template: &str, symbols: &[String]) -> Result<Vec<OhlcvSeries>, CliError> {
    use chrono::NaiveDate;
    use stockcast::market_data::fetch_remote;

    if symbols.is_empty() {
        return Err(CliError::Config("fetching needs --symbol or data.symbols".into()));
    }
    let date = |key: &str| {
        NaiveDate::parse_from_str(cfg.get(key), "%Y-%m-%d").map_err(|_| CliError::Config(format!("{key} must be YYYY-MM-DD")))
    };
    let (start, end) = (date("data.start")?, date("data.end")?);
    symbols
        .iter()
        .map(|s| {
            let body = fetch_remote(template, s, start, end)?;
            let text = String::from_utf8_lossy(&body);
            parse_csv(&body, s).map_err(|e| located(e, s, &text))
        })
        .collect()
}

#[cfg(not(feature = "fetch"))]
fn fetch_all(_: &RunConfig, _: &str, _: &[String]) -> Result<Vec<OhlcvSeries>, CliError> {
    Err(CliError::Config("this build has no HTTP support; rebuild with the `fetch` feature".into()))
}

use chrono::NaiveDate;

use super::CSV_HEADER;
use crate::{Error, Result};

/// Substitutes `{symbol}`, `{start}` and `{end}` (dates as `YYYY-MM-DD`).
pub fn expand_endpoint(template: &str, symbol: &str, start: NaiveDate, end: NaiveDate) -> String {
    template
        .replace("{symbol}", symbol)
        .replace("{start}", &start.format("%Y-%m-%d").to_string())
        .replace("{end}", &end.format("%Y-%m-%d").to_string())
}

/// GETs a quote file and returns the raw CSV body.
///
/// Only the header line is checked here; row-level problems (including a
/// truncated body) surface from [`super::parse_csv`].
pub fn fetch_remote(
    template: &str,
    symbol: &str,
    start: NaiveDate,
    end: NaiveDate,
) -> Result<Vec<u8>> {
    let url = expand_endpoint(template, symbol, start, end);
    let response = reqwest::blocking::get(&url).map_err(|e| Error::Fetch(e.to_string()))?;
    let status = response.status();
    if !status.is_success() {
        return Err(Error::HttpStatus(status.as_u16()));
    }
    let body = response
        .bytes()
        .map_err(|e| Error::Fetch(e.to_string()))?
        .to_vec();
    let first_line = body
        .split(|&b| b == b'\n')
        .next()
        .map(|l| String::from_utf8_lossy(l).trim().to_ascii_lowercase())
        .unwrap_or_default();
    if first_line != CSV_HEADER {
        return Err(Error::Fetch(format!(
            "response from {url} is not an OHLCV CSV (first line `{first_line}`)"
        )));
    }
    Ok(body)
}

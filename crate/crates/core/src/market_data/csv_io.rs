use chrono::NaiveDate;
use csv::{ReaderBuilder, Trim};

use super::{OhlcvBar, OhlcvSeries};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "date,open,high,low,close,volume";
const COLUMNS: [&str; 6] = ["date", "open", "high", "low", "close", "volume"];

/// Parses `date,open,high,low,close,volume` text into a validated series.
///
/// Rows must already be in strictly increasing date order; out-of-order
/// input is rejected rather than sorted.
pub fn parse_csv(raw: &[u8], symbol: &str) -> Result<OhlcvSeries> {
    let mut reader = ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(Trim::All)
        .from_reader(raw);

    let header = reader.headers().map_err(|e| Error::MalformedRow {
        line: 1,
        message: e.to_string(),
    })?;
    if header.is_empty() || header.iter().all(str::is_empty) {
        return Err(Error::Empty);
    }
    let names: Vec<String> = header.iter().map(str::to_ascii_lowercase).collect();
    if names != COLUMNS {
        return Err(Error::MalformedRow {
            line: 1,
            message: format!("expected header `{CSV_HEADER}`, found `{}`", names.join(",")),
        });
    }

    let mut bars: Vec<OhlcvBar> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::MalformedRow {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != COLUMNS.len() {
            return Err(Error::MalformedRow {
                line,
                message: format!("expected 6 fields, found {}", record.len()),
            });
        }
        let malformed = |message: String| Error::MalformedRow { line, message };
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
            .map_err(|e| malformed(format!("bad date `{}`: {e}", &record[0])))?;
        let price = |i: usize| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .map_err(|e| malformed(format!("bad {} `{}`: {e}", COLUMNS[i], &record[i])))
        };
        let bar = OhlcvBar {
            date,
            open: price(1)?,
            high: price(2)?,
            low: price(3)?,
            close: price(4)?,
            volume: record[5]
                .parse::<u64>()
                .map_err(|e| malformed(format!("bad volume `{}`: {e}", &record[5])))?,
        };
        if let Some(prev) = bars.last() {
            if bar.date <= prev.date {
                return Err(Error::NonMonotoneDates { line, date });
            }
        }
        bar.validate()?;
        bars.push(bar);
    }
    if bars.is_empty() {
        return Err(Error::Empty);
    }
    Ok(OhlcvSeries {
        symbol: symbol.to_string(),
        bars,
    })
}

/// Writes the canonical CSV form; `parse_csv` reads it back exactly.
pub fn serialize_csv(series: &OhlcvSeries) -> String {
    let mut out = String::with_capacity(48 * (series.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for b in &series.bars {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            b.date.format("%Y-%m-%d"),
            b.open,
            b.high,
            b.low,
            b.close,
            b.volume
        ));
    }
    out
}

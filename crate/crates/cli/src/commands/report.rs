use std::fmt::Write;

use stockcast::evaluation::ComparisonReport;

use crate::error::CliError;
use crate::output::{read_text, write_atomic, Workspace};

pub fn run(ws: &Workspace) -> Result<(), CliError> {
    let path = ws.report_json();
    if !path.exists() {
        return Err(CliError::Data(format!("{} not found; run `stockcast backtest` first", path.display())));
    }
    let report = ComparisonReport::from_json(&read_text(&path)?)?;
    write_atomic(&ws.report_csv(), report.to_csv().as_bytes())?;
    print!("{}", table(&report));
    Ok(())
}

/// Aligned text table of global-average RMSE, baseline last.
pub fn table(report: &ComparisonReport) -> String {
    let width = report.models.iter().map(String::len).max().unwrap_or(5).max(11);
    let mut out = format!("{:width$}", "model");
    for s in &report.symbols {
        let _ = write!(out, " {s:>12}");
    }
    out.push('\n');
    let cell = |v: Option<f64>| v.map_or_else(|| format!("{:>12}", "failed"), |v| format!("{v:>12.4}"));
    for m in &report.models {
        let _ = write!(out, "{m:width$}");
        for s in &report.symbols {
            let _ = write!(out, " {}", cell(report.cell(m, s).and_then(|c| c.average)));
        }
        out.push('\n');
    }
    if !report.baseline.is_empty() {
        let _ = write!(out, "{:width$}", stockcast::evaluation::BASELINE_MODEL);
        for s in &report.symbols {
            let _ = write!(out, " {}", cell(report.baseline.get(s).and_then(|c| c.average)));
        }
        out.push('\n');
    }
    out
}

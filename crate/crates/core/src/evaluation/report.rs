use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{FoldFailure, ForecastRun};
use crate::market_data::OhlcvSeries;
use crate::{Error, ErrorKind, Result};

/// Model name of the naive last-value forecast. Its results go in the
/// report's baseline section rather than the model grid.
pub const BASELINE_MODEL: &str = "persistence";

/// Row order for the known model families; others follow by name.
const MODEL_ORDER: [&str; 4] = ["lstm_univariate", "lstm_multivariate", "sarima", "additive_boost"];

/// Hex SHA-256 of a resolved config text.
pub fn config_hash(config_text: &str) -> String {
    Sha256::digest(config_text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataRange {
    pub start: String,
    pub end: String,
    pub bars: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub config_hash: String,
    pub seed: u64,
    pub data_range: BTreeMap<String, DataRange>,
}

impl ReportMetadata {
    pub fn new(config_text: &str, seed: u64, series: &[&OhlcvSeries]) -> Self {
        let data_range = series
            .iter()
            .filter_map(|s| {
                let (first, last) = (s.bars.first()?, s.bars.last()?);
                Some((
                    s.symbol.clone(),
                    DataRange {
                        start: first.date.to_string(),
                        end: last.date.to_string(),
                        bars: s.len(),
                    },
                ))
            })
            .collect();
        Self {
            config_hash: config_hash(config_text),
            seed,
            data_range,
        }
    }
}

/// Per-fold detail for one (model, symbol) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportCell {
    /// Fold numbers with a successful run, ascending.
    pub folds: Vec<usize>,
    pub fold_rmse: Vec<f64>,
    pub failed_folds: Vec<usize>,
    /// Mean of `fold_rmse`; absent when any fold failed.
    pub average: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub model: String,
    pub symbol: String,
    pub fold: usize,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub metadata: ReportMetadata,
    pub models: Vec<String>,
    pub symbols: Vec<String>,
    /// model -> symbol -> cell.
    pub cells: BTreeMap<String, BTreeMap<String, ReportCell>>,
    /// symbol -> persistence cell.
    pub baseline: BTreeMap<String, ReportCell>,
    pub failures: Vec<FailureRecord>,
}

fn kind_name(kind: ErrorKind) -> &'static str {
    match kind {
        ErrorKind::Config => "config",
        ErrorKind::Data => "data",
        ErrorKind::Model => "model",
    }
}

fn model_rank(name: &str) -> (usize, &str) {
    (MODEL_ORDER.iter().position(|m| *m == name).unwrap_or(MODEL_ORDER.len()), name)
}

/// Groups runs by model and symbol. The result does not depend on the
/// order of `runs` or `failures`.
pub fn build_report(runs: &[ForecastRun], failures: &[FoldFailure], metadata: ReportMetadata) -> Result<ComparisonReport> {
    if runs.is_empty() && failures.is_empty() {
        return Err(Error::Empty);
    }
    let mut grouped: BTreeMap<(String, String), (BTreeMap<usize, f64>, BTreeSet<usize>)> = BTreeMap::new();
    for run in runs {
        let entry = grouped.entry((run.model.clone(), run.symbol.clone())).or_default();
        if entry.0.insert(run.fold, run.rmse()?).is_some() {
            return Err(Error::Dimension(format!("{} fold {} on {} appears twice", run.model, run.fold, run.symbol)));
        }
    }
    for f in failures {
        grouped.entry((f.model.clone(), f.symbol.clone())).or_default().1.insert(f.fold);
    }

    let symbols: Vec<String> = grouped.keys().map(|(_, s)| s.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let mut models: Vec<String> = grouped
        .keys()
        .map(|(m, _)| m.clone())
        .filter(|m| m != BASELINE_MODEL)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    models.sort_by(|a, b| model_rank(a).cmp(&model_rank(b)));

    for symbol in &symbols {
        let counts: BTreeMap<&str, usize> = grouped
            .iter()
            .filter(|((_, s), _)| s == symbol)
            .map(|((m, _), (ok, bad))| (m.as_str(), ok.len() + bad.len()))
            .collect();
        let distinct: BTreeSet<usize> = counts.values().copied().collect();
        let every_model = models.iter().all(|m| counts.contains_key(m.as_str()));
        if distinct.len() > 1 || !every_model {
            return Err(Error::Dimension(format!("inconsistent fold counts on {symbol}: {counts:?}")));
        }
    }

    let mut cells: BTreeMap<String, BTreeMap<String, ReportCell>> = BTreeMap::new();
    let mut baseline = BTreeMap::new();
    for ((model, symbol), (ok, bad)) in grouped {
        let fold_rmse: Vec<f64> = ok.values().copied().collect();
        let average = (bad.is_empty() && !fold_rmse.is_empty()).then(|| fold_rmse.iter().sum::<f64>() / fold_rmse.len() as f64);
        let cell = ReportCell {
            folds: ok.keys().copied().collect(),
            fold_rmse,
            failed_folds: bad.into_iter().collect(),
            average,
        };
        if model == BASELINE_MODEL {
            baseline.insert(symbol, cell);
        } else {
            cells.entry(model).or_default().insert(symbol, cell);
        }
    }

    let mut failures: Vec<FailureRecord> = failures
        .iter()
        .map(|f| FailureRecord {
            model: f.model.clone(),
            symbol: f.symbol.clone(),
            fold: f.fold,
            kind: kind_name(f.kind).to_string(),
            message: f.message.clone(),
        })
        .collect();
    failures.sort_by(|a, b| (&a.model, &a.symbol, a.fold).cmp(&(&b.model, &b.symbol, b.fold)));

    Ok(ComparisonReport {
        metadata,
        models,
        symbols,
        cells,
        baseline,
        failures,
    })
}

impl ComparisonReport {
    pub fn cell(&self, model: &str, symbol: &str) -> Option<&ReportCell> {
        self.cells.get(model)?.get(symbol)
    }

    /// Model rows by symbol columns of global-average RMSE; `NA` marks a
    /// cell with a failed fold.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model");
        for s in &self.symbols {
            out.push(',');
            out.push_str(s);
        }
        out.push('\n');
        for m in &self.models {
            out.push_str(m);
            for s in &self.symbols {
                out.push(',');
                match self.cell(m, s).and_then(|c| c.average) {
                    Some(v) => out.push_str(&v.to_string()),
                    None => out.push_str("NA"),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("report json: {e}")))
    }
}

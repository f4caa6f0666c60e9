//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every exported function takes and returns plain strings and numbers.
//! Results are CSV text that the page turns into SVG charts. The `*_csv`
//! helpers hold the logic so it can be tested natively; the exported
//! wrappers only convert errors into JavaScript exceptions.

use std::fmt::Write;

use stockcast::additive::{fit, predict_with_interval, AdditiveConfig, IntervalConfig, SeasonalityConfig};
use stockcast::market_data::{next_trading_days, parse_csv, OhlcvSeries};
use stockcast::sarima::{self, SarimaConfig, SarimaOrder};
use stockcast::sentiment::{
    parse_documents, parse_labeled_corpus, score_documents, supervised_estimate, Lexicon, VOCAB_SIZE,
};
use wasm_bindgen::prelude::*;

const SAMPLE_PRICES: &str = include_str!("../../cli/data/sample.csv");
const SAMPLE_LEXICON: &str = include_str!("../../cli/data/lexicon.tsv");
const SAMPLE_CORPUS: &str = include_str!("../../cli/data/corpus.txt");
const SAMPLE_DOCUMENTS: &str = include_str!("../../cli/data/documents.tsv");

/// Bundled demo inputs: `prices`, `lexicon`, `corpus` or `documents`.
#[wasm_bindgen]
pub fn sample(name: &str) -> String {
    match name {
        "prices" => SAMPLE_PRICES,
        "lexicon" => SAMPLE_LEXICON,
        "corpus" => SAMPLE_CORPUS,
        "documents" => SAMPLE_DOCUMENTS,
        _ => "",
    }
    .to_string()
}

fn load(prices: &str) -> Result<OhlcvSeries, String> {
    let series = parse_csv(prices.as_bytes(), "input").map_err(|e| e.to_string())?;
    if series.is_empty() {
        return Err("the price file has no rows".into());
    }
    Ok(series)
}

/// Closing prices as `date,close` rows, for drawing the history.
pub fn history_csv(prices: &str) -> Result<String, String> {
    let series = load(prices)?;
    let mut out = String::from("date,close\n");
    for b in &series.bars {
        let _ = writeln!(out, "{},{}", b.date, b.close);
    }
    Ok(out)
}

/// Additive forecast of the closes with an uncertainty band:
/// `date,mean,lower,upper` rows.
pub fn additive_csv(prices: &str, horizon: usize, changepoints: usize, weekly_terms: usize, level: f64) -> Result<String, String> {
    let series = load(prices)?;
    let seasonalities = if weekly_terms > 0 {
        vec![SeasonalityConfig {
            period: 5.0,
            terms: weekly_terms,
        }]
    } else {
        Vec::new()
    };
    let cfg = AdditiveConfig {
        n_changepoints: changepoints,
        seasonalities,
        ..AdditiveConfig::default()
    };
    let model = fit(&series.dates(), &series.closes(), &[], &cfg).map_err(|e| e.to_string())?;
    let future = next_trading_days(model.last_date, horizon);
    let ic = IntervalConfig {
        level,
        ..IntervalConfig::default()
    };
    let points = predict_with_interval(&model, &future, None, &ic).map_err(|e| e.to_string())?;
    let mut out = String::from("date,mean,lower,upper\n");
    for p in points {
        let _ = writeln!(out, "{},{},{},{}", p.date, p.mean, p.lower, p.upper);
    }
    Ok(out)
}

fn parse_order(text: &str, want: usize) -> Result<Vec<usize>, String> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| format!("bad order {text:?}")))
        .collect::<Result<_, _>>()?;
    if parts.len() != want {
        return Err(format!("expected {want} comma-separated integers, got {text:?}"));
    }
    Ok(parts)
}

/// SARIMA forecast of the closes: `date,forecast` rows. `order` is
/// `p,d,q` and `seasonal` is `P,D,Q,m`.
pub fn sarima_csv(prices: &str, order: &str, seasonal: &str, horizon: usize) -> Result<String, String> {
    let series = load(prices)?;
    let o = parse_order(order, 3)?;
    let s = parse_order(seasonal, 4)?;
    let order = SarimaOrder::new(o[0], o[1], o[2], s[0], s[1], s[2], s[3]);
    let cfg = SarimaConfig {
        restarts: 1,
        ..SarimaConfig::default()
    };
    let model = sarima::fit(&series.closes(), order, &cfg).map_err(|e| e.to_string())?;
    let values = model.forecast(horizon).map_err(|e| e.to_string())?;
    let dates = next_trading_days(series.bars[series.len() - 1].date, horizon);
    let mut out = String::from("date,forecast\n");
    for (d, v) in dates.iter().zip(values) {
        let _ = writeln!(out, "{d},{v}");
    }
    Ok(out)
}

/// Estimates the sentiment HMM from the labeled corpus, decodes every
/// document and returns the daily `date,sentiment` scores.
pub fn sentiment_csv(lexicon: &str, corpus: &str, documents: &str) -> Result<String, String> {
    let lexicon = Lexicon::parse(lexicon).map_err(|e| e.to_string())?;
    let labels: Vec<String> = ["positive", "negative", "neutral"].iter().map(|s| s.to_string()).collect();
    let corpus = parse_labeled_corpus(corpus, &lexicon, &labels).map_err(|e| e.to_string())?;
    let model = supervised_estimate(&corpus, &labels, VOCAB_SIZE).map_err(|e| e.to_string())?;
    let docs = parse_documents(documents, &lexicon).map_err(|e| e.to_string())?;
    let series = score_documents(&model, &docs).map_err(|e| e.to_string())?;
    Ok(series.to_csv())
}

#[wasm_bindgen]
pub fn history(prices: &str) -> Result<String, JsError> {
    history_csv(prices).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn additive_forecast(prices: &str, horizon: usize, changepoints: usize, weekly_terms: usize, level: f64) -> Result<String, JsError> {
    additive_csv(prices, horizon, changepoints, weekly_terms, level).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sarima_forecast(prices: &str, order: &str, seasonal: &str, horizon: usize) -> Result<String, JsError> {
    sarima_csv(prices, order, seasonal, horizon).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn decode_sentiment(lexicon: &str, corpus: &str, documents: &str) -> Result<String, JsError> {
    sentiment_csv(lexicon, corpus, documents).map_err(|e| JsError::new(&e))
}

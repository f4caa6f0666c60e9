//! Segments, per-date scores and alignment to trading dates.

use std::collections::BTreeMap;

use chrono::NaiveDate;

use super::{viterbi, DecodedPath, DocumentRecord, HmmModel};
use crate::Result;

/// Days a score is carried forward to later trading dates.
pub const LOOKBACK_DAYS: i64 = 3;

/// A maximal run of one state, `start..=end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub state: usize,
}

/// Maximal constant-state runs of at least `min_run` tokens, in order.
pub fn extract_segments(path: &DecodedPath, min_run: usize) -> Vec<Segment> {
    let min_run = min_run.max(1);
    let mut out = Vec::new();
    let s = &path.states;
    let mut start = 0;
    for i in 1..=s.len() {
        if i == s.len() || s[i] != s[start] {
            if i - start >= min_run {
                out.push(Segment {
                    start,
                    end: i - 1,
                    state: s[start],
                });
            }
            start = i;
        }
    }
    out
}

/// `(#positive − #negative) / T` for one decoded document.
pub fn score_path(model: &HmmModel, path: &DecodedPath) -> f64 {
    let pos = model.state_index("positive");
    let neg = model.state_index("negative");
    let count = |s: Option<usize>| s.map_or(0, |s| path.states.iter().filter(|&&x| x == s).count()) as f64;
    if path.states.is_empty() {
        return 0.0;
    }
    (count(pos) - count(neg)) / path.states.len() as f64
}

/// Daily scores, one per date that has at least one document.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SentimentSeries {
    pub scores: BTreeMap<NaiveDate, f64>,
}

impl SentimentSeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,sentiment\n");
        for (d, s) in &self.scores {
            out.push_str(&format!("{d},{s}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut scores = BTreeMap::new();
        for (no, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |m: &str| crate::Error::MalformedRow {
                line: no as u64 + 1,
                message: m.to_string(),
            };
            let (d, s) = line.split_once(',').ok_or_else(|| bad("expected `date,sentiment`"))?;
            let date = NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d").map_err(|_| bad("bad date"))?;
            let score: f64 = s.trim().parse().map_err(|_| bad("bad score"))?;
            if !(-1.0..=1.0).contains(&score) {
                return Err(bad("score outside [-1, 1]"));
            }
            scores.insert(date, score);
        }
        Ok(Self { scores })
    }
}

/// Decode every document and average the document scores per date.
pub fn score_documents(model: &HmmModel, docs: &[DocumentRecord]) -> Result<SentimentSeries> {
    let mut sums: BTreeMap<NaiveDate, (f64, usize)> = BTreeMap::new();
    for doc in docs {
        let path = viterbi(model, &doc.tokens)?;
        let e = sums.entry(doc.date).or_insert((0.0, 0));
        e.0 += score_path(model, &path);
        e.1 += 1;
    }
    Ok(SentimentSeries {
        scores: sums.into_iter().map(|(d, (s, n))| (d, s / n as f64)).collect(),
    })
}

/// Most recent score at or before each trading date within
/// [`LOOKBACK_DAYS`]; 0 where there is none.
pub fn align_sentiment(trading_dates: &[NaiveDate], series: &SentimentSeries) -> Vec<f64> {
    trading_dates
        .iter()
        .map(|&d| {
            series
                .scores
                .range(..=d)
                .next_back()
                .filter(|(s, _)| (d - **s).num_days() <= LOOKBACK_DAYS)
                .map_or(0.0, |(_, v)| *v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(states: &[usize]) -> DecodedPath {
        DecodedPath {
            states: states.to_vec(),
            log_prob: -1.0,
        }
    }

    #[test]
    fn segments() {
        let segs = extract_segments(&path(&[0, 0, 1, 1, 1, 2]), 2);
        assert_eq!(
            segs,
            vec![
                Segment { start: 0, end: 1, state: 0 },
                Segment { start: 2, end: 4, state: 1 }
            ]
        );
        assert_eq!(extract_segments(&path(&[3; 5]), 1).len(), 1);
        assert_eq!(extract_segments(&path(&[0, 1, 0]), 1).len(), 3);
    }

    fn date(d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2024, 6, d).unwrap()
    }

    #[test]
    fn alignment() {
        // 2024-06-08 is a Saturday, 06-10 a Monday
        let s = SentimentSeries {
            scores: [(date(8), 0.4), (date(11), -0.2)].into(),
        };
        let got = align_sentiment(&[date(7), date(10), date(11), date(12), date(17)], &s);
        assert_eq!(got, vec![0.0, 0.4, -0.2, -0.2, 0.0]);
        assert_eq!(align_sentiment(&[date(3)], &SentimentSeries::default()), vec![0.0]);
    }

    #[test]
    fn csv_round_trip() {
        let s = SentimentSeries {
            scores: [(date(3), 0.25), (date(4), -1.0)].into(),
        };
        assert_eq!(SentimentSeries::from_csv(&s.to_csv()).unwrap(), s);
    }
}

//! News sentiment from a hidden Markov model over token categories.
//!
//! Words are mapped to a small categorical vocabulary by a lexicon, each
//! document is decoded token by token with Viterbi, and the decoded states
//! become a per-date score in `[-1, 1]` that feeds the forecasters as an
//! exogenous regressor.

mod estimate;
mod score;
mod text;
mod viterbi;

use crate::textfmt::{Reader, Writer};
use crate::{Error, Result};

pub use estimate::{supervised_estimate, LabeledSequence};
pub use score::{align_sentiment, extract_segments, score_documents, score_path, Segment, SentimentSeries};
pub use text::{
    parse_documents, parse_labeled_corpus, tokenize, Category, DocumentRecord, Lexicon, VOCAB_SIZE,
};
pub use viterbi::{path_log_prob, viterbi, DecodedPath};

const MAGIC: &str = "stockcast-hmm v1";
const STOCHASTIC_TOL: f64 = 1e-9;

/// Default state labels, in index order.
pub const DEFAULT_LABELS: [&str; 3] = ["positive", "negative", "neutral"];

#[derive(Debug, Clone, PartialEq)]
pub struct HmmModel {
    labels: Vec<String>,
    transition: Vec<Vec<f64>>,
    emission: Vec<Vec<f64>>,
    initial: Vec<f64>,
}

fn check_distribution(row: &[f64], what: &str) -> Result<()> {
    if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::Config(format!("{what} has a negative or non-finite probability")));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > STOCHASTIC_TOL {
        return Err(Error::Config(format!("{what} sums to {sum}, not 1")));
    }
    Ok(())
}

impl HmmModel {
    pub fn new(labels: Vec<String>, transition: Vec<Vec<f64>>, emission: Vec<Vec<f64>>, initial: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        if n < 2 {
            return Err(Error::Config("an HMM needs at least two states".into()));
        }
        if transition.len() != n || emission.len() != n || initial.len() != n {
            return Err(Error::Dimension(format!("{n} labels but matrices of other sizes")));
        }
        let v = emission[0].len();
        if v == 0 {
            return Err(Error::Config("vocabulary must not be empty".into()));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!("transition row {i} has {} entries", row.len())));
            }
            check_distribution(row, &format!("transition row {i}"))?;
        }
        for (i, row) in emission.iter().enumerate() {
            if row.len() != v {
                return Err(Error::Dimension(format!("emission row {i} has {} entries", row.len())));
            }
            check_distribution(row, &format!("emission row {i}"))?;
        }
        check_distribution(&initial, "initial distribution")?;
        Ok(Self {
            labels,
            transition,
            emission,
            initial,
        })
    }

    pub fn n_states(&self) -> usize {
        self.labels.len()
    }

    pub fn vocab_size(&self) -> usize {
        self.emission[0].len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn emission(&self) -> &[Vec<f64>] {
        &self.emission
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn save(&self) -> String {
        let mut w = Writer::new(MAGIC);
        w.field("labels", self.labels.join(" "))
            .field("vocab", self.vocab_size());
        for row in &self.transition {
            w.floats("a", row);
        }
        for row in &self.emission {
            w.floats("b", row);
        }
        w.floats("pi", &self.initial);
        w.finish()
    }

    pub fn load(text: &str) -> Result<Self> {
        let mut r = Reader::new(text, MAGIC)?;
        let labels: Vec<String> = r.field("labels")?.split_whitespace().map(String::from).collect();
        let n = labels.len();
        let v: usize = r.parse("vocab")?;
        let transition = (0..n).map(|_| r.floats_len("a", n)).collect::<Result<Vec<_>>>()?;
        let emission = (0..n).map(|_| r.floats_len("b", v)).collect::<Result<Vec<_>>>()?;
        let initial = r.floats_len("pi", n)?;
        Self::new(labels, transition, emission, initial).map_err(|e| Error::Format(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_state() -> HmmModel {
        HmmModel::new(
            vec!["positive".into(), "negative".into()],
            vec![vec![0.7, 0.3], vec![0.4, 0.6]],
            vec![vec![0.5, 0.4, 0.1], vec![0.1, 0.3, 0.6]],
            vec![0.6, 0.4],
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let bad = HmmModel::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.5, 0.6], vec![0.5, 0.5]],
            vec![vec![1.0], vec![1.0]],
            vec![0.5, 0.5],
        );
        assert!(bad.is_err());
        let one = HmmModel::new(vec!["a".into()], vec![vec![1.0]], vec![vec![1.0]], vec![1.0]);
        assert!(one.is_err());
    }

    #[test]
    fn round_trip() {
        let m = two_state();
        assert_eq!(HmmModel::load(&m.save()).unwrap(), m);
    }
}

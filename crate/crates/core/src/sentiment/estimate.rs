//! Supervised estimation of HMM parameters by smoothed counting.

use super::HmmModel;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledSequence {
    pub tokens: Vec<usize>,
    pub states: Vec<usize>,
}

/// Add-one smoothed initial, transition and emission frequencies.
pub fn supervised_estimate(corpus: &[LabeledSequence], labels: &[String], vocab_size: usize) -> Result<HmmModel> {
    let n = labels.len();
    if corpus.iter().all(|s| s.tokens.is_empty()) {
        return Err(Error::Empty);
    }
    let mut first = vec![0.0; n];
    let mut trans = vec![vec![0.0; n]; n];
    let mut emit = vec![vec![0.0; vocab_size]; n];
    for (i, seq) in corpus.iter().enumerate() {
        if seq.tokens.len() != seq.states.len() {
            return Err(Error::Dimension(format!("sequence {i}: tokens and states differ in length")));
        }
        if let Some(&s) = seq.states.iter().find(|&&s| s >= n) {
            return Err(Error::Config(format!("sequence {i}: unseen state label {s}")));
        }
        if let Some(&o) = seq.tokens.iter().find(|&&o| o >= vocab_size) {
            return Err(Error::Dimension(format!("sequence {i}: symbol {o} outside vocabulary")));
        }
        if let Some(&s) = seq.states.first() {
            first[s] += 1.0;
        }
        for w in seq.states.windows(2) {
            trans[w[0]][w[1]] += 1.0;
        }
        for (&o, &s) in seq.tokens.iter().zip(&seq.states) {
            emit[s][o] += 1.0;
        }
    }
    let smooth = |row: &[f64]| -> Vec<f64> {
        let total: f64 = row.iter().sum::<f64>() + row.len() as f64;
        row.iter().map(|c| (c + 1.0) / total).collect()
    };
    HmmModel::new(
        labels.to_vec(),
        trans.iter().map(|r| smooth(r)).collect(),
        emit.iter().map(|r| smooth(r)).collect(),
        smooth(&first),
    )
}

//! Log-space Viterbi decoding with deterministic tie-breaking.

use super::HmmModel;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedPath {
    pub states: Vec<usize>,
    pub log_prob: f64,
}

/// Joint log-probability of observations and a given state path.
pub fn path_log_prob(model: &HmmModel, obs: &[usize], states: &[usize]) -> f64 {
    let mut lp = 0.0;
    for (t, (&o, &s)) in obs.iter().zip(states).enumerate() {
        lp += if t == 0 {
            model.initial()[s].ln()
        } else {
            model.transition()[states[t - 1]][s].ln()
        };
        lp += model.emission()[s][o].ln();
    }
    lp
}

fn tied(a: f64, best: f64) -> bool {
    a == best || (a.is_finite() && (a - best).abs() <= 1e-12 * (1.0 + best.abs()))
}

/// Most probable state path. Among equally probable paths the
/// lexicographically smallest one is returned.
pub fn viterbi(model: &HmmModel, obs: &[usize]) -> Result<DecodedPath> {
    let n = model.n_states();
    let v = model.vocab_size();
    if obs.is_empty() {
        return Err(Error::Empty);
    }
    if let Some(&bad) = obs.iter().find(|&&o| o >= v) {
        return Err(Error::Dimension(format!("symbol {bad} outside vocabulary of {v}")));
    }
    for (t, &o) in obs.iter().enumerate() {
        if (0..n).all(|j| model.emission()[j][o] == 0.0) {
            return Err(Error::ZeroProbability { position: t, symbol: o });
        }
    }
    let log_a: Vec<Vec<f64>> = model.transition().iter().map(|r| r.iter().map(|p| p.ln()).collect()).collect();
    let log_b = |j: usize, o: usize| model.emission()[j][o].ln();
    let big_t = obs.len();

    // backward[t][j]: best log-probability of observations after t given state j at t
    let mut backward = vec![vec![0.0; n]; big_t];
    for t in (0..big_t - 1).rev() {
        for i in 0..n {
            backward[t][i] = (0..n)
                .map(|j| log_a[i][j] + log_b(j, obs[t + 1]) + backward[t + 1][j])
                .fold(f64::NEG_INFINITY, f64::max);
        }
    }
    let start: Vec<f64> = (0..n).map(|j| model.initial()[j].ln() + log_b(j, obs[0])).collect();
    let best = (0..n).map(|j| start[j] + backward[0][j]).fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return Err(Error::ZeroProbability {
            position: 0,
            symbol: obs[0],
        });
    }

    // Walk forward taking the smallest state that can still reach `best`.
    let mut states: Vec<usize> = Vec::with_capacity(big_t);
    let mut prefix = 0.0f64;
    for t in 0..big_t {
        let step = |j: usize| {
            if t == 0 {
                start[j]
            } else {
                log_a[states[t - 1]][j] + log_b(j, obs[t])
            }
        };
        let (choice, gain) = (0..n)
            .map(|j| (j, step(j)))
            .find(|&(j, s)| tied(prefix + s + backward[t][j], best))
            .unwrap_or_else(|| {
                // rounding pushed every candidate off `best`; keep the closest
                (0..n)
                    .map(|j| (j, step(j)))
                    .max_by(|a, b| (prefix + a.1 + backward[t][a.0]).total_cmp(&(prefix + b.1 + backward[t][b.0])).then(b.0.cmp(&a.0)))
                    .expect("at least two states")
            });
        states.push(choice);
        prefix += gain;
    }
    let log_prob = path_log_prob(model, obs, &states);
    if !log_prob.is_finite() {
        return Err(Error::NonFinite("decoded path probability".into()));
    }
    Ok(DecodedPath { states, log_prob })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sentiment::tests::two_state;

    #[test]
    fn dominant_state_everywhere() {
        let m = HmmModel::new(
            vec!["p".into(), "q".into()],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            vec![vec![0.45, 0.45, 0.1], vec![0.2, 0.2, 0.6]],
            vec![0.5, 0.5],
        )
        .unwrap();
        assert_eq!(viterbi(&m, &[0, 1, 1, 0]).unwrap().states, vec![0; 4]);
    }

    #[test]
    fn single_observation() {
        let m = two_state();
        // π·B: state 0 → 0.6·0.1, state 1 → 0.4·0.6
        let p = viterbi(&m, &[2]).unwrap();
        assert_eq!(p.states, vec![1]);
        assert!((p.log_prob - (0.4f64 * 0.6).ln()).abs() < 1e-15);
    }

    #[test]
    fn zero_probability_symbol() {
        let m = HmmModel::new(
            vec!["p".into(), "q".into()],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            vec![vec![1.0, 0.0], vec![1.0, 0.0]],
            vec![0.5, 0.5],
        )
        .unwrap();
        assert!(matches!(viterbi(&m, &[0, 1]), Err(Error::ZeroProbability { position: 1, symbol: 1 })));
    }

    #[test]
    fn ties_resolve_lexicographically() {
        let m = HmmModel::new(
            vec!["p".into(), "q".into()],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            vec![0.5, 0.5],
        )
        .unwrap();
        assert_eq!(viterbi(&m, &[0, 1, 0]).unwrap().states, vec![0, 0, 0]);
    }
}

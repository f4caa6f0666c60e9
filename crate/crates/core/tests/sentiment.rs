use std::collections::HashMap;

use chrono::NaiveDate;
use proptest::prelude::*;
use stockcast::sentiment::{
    extract_segments, path_log_prob, score_documents, supervised_estimate, viterbi, DecodedPath, DocumentRecord,
    HmmModel, LabeledSequence,
};

fn normalize(w: &[u32]) -> Vec<f64> {
    let total: u32 = w.iter().sum();
    w.iter().map(|&x| x as f64 / total as f64).collect()
}

/// Small integer weights make exact ties between paths common.
fn model_strategy() -> impl Strategy<Value = HmmModel> {
    (2usize..=4, 1usize..=5).prop_flat_map(|(n, v)| {
        let row = |k: usize| prop::collection::vec(1u32..4, k);
        (
            prop::collection::vec(row(n), n),
            prop::collection::vec(row(v), n),
            row(n),
        )
            .prop_map(move |(a, b, pi)| {
                HmmModel::new(
                    (0..n).map(|i| format!("s{i}")).collect(),
                    a.iter().map(|r| normalize(r)).collect(),
                    b.iter().map(|r| normalize(r)).collect(),
                    normalize(&pi),
                )
                .unwrap()
            })
    })
}

fn all_paths(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..t {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |s| {
                    let mut q = p.clone();
                    q.push(s);
                    q
                })
            })
            .collect();
    }
    out
}

proptest! {
    #[test]
    fn viterbi_matches_brute_force(model in model_strategy(), raw in prop::collection::vec(0usize..5, 1..=8)) {
        let obs: Vec<usize> = raw.iter().map(|o| o % model.vocab_size()).collect();
        let decoded = viterbi(&model, &obs).unwrap();
        let paths = all_paths(model.n_states(), obs.len());
        let scores: Vec<f64> = paths.iter().map(|p| path_log_prob(&model, &obs, p)).collect();
        let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((decoded.log_prob - best).abs() < 1e-10);
        prop_assert!(decoded.log_prob <= 0.0);
        // smallest member of the argmax set in lexicographic order
        let first = paths.iter().zip(&scores).find(|(_, s)| (**s - best).abs() < 1e-10).unwrap().0;
        prop_assert_eq!(&decoded.states, first);
    }

    #[test]
    fn estimates_are_stochastic(seqs in prop::collection::vec(prop::collection::vec((0usize..7, 0usize..3), 1..20), 1..10)) {
        let corpus: Vec<LabeledSequence> = seqs.iter().map(|s| LabeledSequence {
            tokens: s.iter().map(|p| p.0).collect(),
            states: s.iter().map(|p| p.1).collect(),
        }).collect();
        let labels: Vec<String> = ["positive", "negative", "neutral"].iter().map(|s| s.to_string()).collect();
        let m = supervised_estimate(&corpus, &labels, 7).unwrap();
        for row in m.transition().iter().chain(m.emission()) {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(row.iter().all(|p| *p > 0.0));
        }
        prop_assert!((m.initial().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn segments_partition_the_path(states in prop::collection::vec(0usize..3, 1..60)) {
        let path = DecodedPath { states: states.clone(), log_prob: -1.0 };
        let segs = extract_segments(&path, 1);
        let mut rebuilt = Vec::new();
        let mut next = 0;
        for s in &segs {
            prop_assert_eq!(s.start, next);
            prop_assert!(s.end >= s.start);
            rebuilt.extend(std::iter::repeat_n(s.state, s.end - s.start + 1));
            next = s.end + 1;
        }
        prop_assert_eq!(rebuilt, states);
    }

    #[test]
    fn scores_are_bounded(model in model_strategy(), docs in prop::collection::vec((0u32..5, prop::collection::vec(0usize..5, 1..12)), 1..10)) {
        let mut m = model;
        let labels: Vec<String> = (0..m.n_states()).map(|i| ["positive", "negative", "neutral", "other"][i].to_string()).collect();
        m = HmmModel::new(labels, m.transition().to_vec(), m.emission().to_vec(), m.initial().to_vec()).unwrap();
        let v = m.vocab_size();
        let records: Vec<DocumentRecord> = docs.iter().map(|(d, toks)| DocumentRecord {
            date: NaiveDate::from_ymd_opt(2024, 2, 1 + d).unwrap(),
            source: "wire".into(),
            tokens: toks.iter().map(|t| t % v).collect(),
        }).collect();
        let series = score_documents(&m, &records).unwrap();
        prop_assert!(series.scores.values().all(|s| (-1.0..=1.0).contains(s)));
    }
}

#[test]
fn long_sequences_stay_finite() {
    let model = HmmModel::new(
        vec!["positive".into(), "negative".into(), "neutral".into()],
        vec![vec![0.8, 0.1, 0.1], vec![0.1, 0.8, 0.1], vec![0.2, 0.2, 0.6]],
        vec![
            vec![0.3, 0.3, 0.1, 0.05, 0.05, 0.1, 0.1],
            vec![0.05, 0.05, 0.1, 0.3, 0.3, 0.1, 0.1],
            vec![0.1, 0.1, 0.3, 0.1, 0.1, 0.15, 0.15],
        ],
        vec![0.3, 0.3, 0.4],
    )
    .unwrap();
    let obs: Vec<usize> = (0..10_000).map(|t| (t * 7 + t / 13) % 7).collect();
    let path = viterbi(&model, &obs).unwrap();
    assert_eq!(path.states.len(), 10_000);
    assert!(path.log_prob.is_finite() && path.log_prob < 0.0);
}

#[test]
fn counts_match_independent_tally() {
    // 20 deterministic sequences over 3 states and 7 symbols
    let corpus: Vec<LabeledSequence> = (0..20)
        .map(|i| {
            let len = 3 + i % 5;
            LabeledSequence {
                tokens: (0..len).map(|t| (i * 3 + t * 5) % 7).collect(),
                states: (0..len).map(|t| (i + t / 2) % 3).collect(),
            }
        })
        .collect();
    let labels: Vec<String> = ["positive", "negative", "neutral"].iter().map(|s| s.to_string()).collect();
    let m = supervised_estimate(&corpus, &labels, 7).unwrap();

    let mut first: HashMap<usize, f64> = HashMap::new();
    let mut trans: HashMap<(usize, usize), f64> = HashMap::new();
    let mut emit: HashMap<(usize, usize), f64> = HashMap::new();
    for seq in &corpus {
        *first.entry(seq.states[0]).or_default() += 1.0;
        for t in 0..seq.states.len() {
            *emit.entry((seq.states[t], seq.tokens[t])).or_default() += 1.0;
            if t > 0 {
                *trans.entry((seq.states[t - 1], seq.states[t])).or_default() += 1.0;
            }
        }
    }
    for i in 0..3 {
        let pi = (first.get(&i).unwrap_or(&0.0) + 1.0) / (20.0 + 3.0);
        assert!((m.initial()[i] - pi).abs() < 1e-15);
        let row_total: f64 = (0..3).map(|j| trans.get(&(i, j)).unwrap_or(&0.0)).sum();
        for j in 0..3 {
            let a = (trans.get(&(i, j)).unwrap_or(&0.0) + 1.0) / (row_total + 3.0);
            assert!((m.transition()[i][j] - a).abs() < 1e-15);
        }
        let emit_total: f64 = (0..7).map(|o| emit.get(&(i, o)).unwrap_or(&0.0)).sum();
        for o in 0..7 {
            let b = (emit.get(&(i, o)).unwrap_or(&0.0) + 1.0) / (emit_total + 7.0);
            assert!((m.emission()[i][o] - b).abs() < 1e-15);
        }
    }
}

#[test]
fn daily_scores_average_documents() {
    let model = HmmModel::new(
        vec!["positive".into(), "negative".into(), "neutral".into()],
        vec![vec![1.0 / 3.0; 3], vec![1.0 / 3.0; 3], vec![1.0 / 3.0; 3]],
        vec![vec![0.8, 0.1, 0.1], vec![0.1, 0.8, 0.1], vec![0.1, 0.1, 0.8]],
        vec![1.0 / 3.0; 3],
    )
    .unwrap();
    let day = NaiveDate::from_ymd_opt(2024, 3, 1).unwrap();
    let doc = |tokens: Vec<usize>| DocumentRecord {
        date: day,
        source: "wire".into(),
        tokens,
    };
    let s = score_documents(&model, &[doc(vec![0, 0, 0])]).unwrap();
    assert_eq!(s.scores[&day], 1.0);
    let s = score_documents(&model, &[doc(vec![2, 2])]).unwrap();
    assert_eq!(s.scores[&day], 0.0);
    let s = score_documents(&model, &[doc(vec![0, 0]), doc(vec![2])]).unwrap();
    assert_eq!(s.scores[&day], 0.5);
}

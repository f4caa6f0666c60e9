//! Text formats for boosted ensembles and hybrid models.

use super::tree::{BoostedEnsemble, Node, RegressionTree};
use super::HybridModel;
use crate::additive::AdditiveModel;
use crate::textfmt::{Reader, Writer};
use crate::{Error, Result};

const BOOST_MAGIC: &str = "stockcast-boost v1";
const HYBRID_MAGIC: &str = "stockcast-hybrid v1";

pub(super) fn save_ensemble(e: &BoostedEnsemble) -> String {
    let mut w = Writer::new(BOOST_MAGIC);
    w.field("n_features", e.n_features)
        .field("base_score", e.base_score)
        .field("learning_rate", e.learning_rate)
        .field("trees", e.trees.len());
    for tree in &e.trees {
        let tree = tree.to_preorder();
        w.field("tree", tree.nodes.len());
        for node in &tree.nodes {
            match node {
                Node::Split { feature, threshold, .. } => w.field("split", format!("{feature} {threshold}")),
                Node::Leaf { value } => w.field("leaf", value),
            };
        }
    }
    w.finish()
}

pub(super) fn load_ensemble(text: &str) -> Result<BoostedEnsemble> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default().trim();
    if header != BOOST_MAGIC {
        return Err(Error::Format(format!("expected header `{BOOST_MAGIC}`, found `{header}`")));
    }
    let num = |s: String, what: &str| -> Result<f64> { s.trim().parse().map_err(|_| Error::Format(format!("bad {what} `{s}`"))) };
    let n_features: usize = kv(&mut lines, "n_features")?.trim().parse().map_err(|_| Error::Format("bad n_features".into()))?;
    let base_score = num(kv(&mut lines, "base_score")?, "base_score")?;
    let learning_rate = num(kv(&mut lines, "learning_rate")?, "learning_rate")?;
    let n_trees: usize = kv(&mut lines, "trees")?.trim().parse().map_err(|_| Error::Format("bad tree count".into()))?;
    let mut trees = Vec::with_capacity(n_trees);
    for _ in 0..n_trees {
        let count: usize = kv(&mut lines, "tree")?.trim().parse().map_err(|_| Error::Format("bad node count".into()))?;
        let mut raw = Vec::with_capacity(count);
        for _ in 0..count {
            let line = lines.next().ok_or_else(|| Error::Format("truncated tree".into()))?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            raw.push(match parts.as_slice() {
                ["leaf", v] => Node::Leaf {
                    value: v.parse().map_err(|_| Error::Format(format!("bad leaf `{v}`")))?,
                },
                ["split", f, t] => {
                    let feature: usize = f.parse().map_err(|_| Error::Format(format!("bad feature `{f}`")))?;
                    if feature >= n_features {
                        return Err(Error::Format(format!("split on feature {feature} of {n_features}")));
                    }
                    Node::Split {
                        feature,
                        threshold: t.parse().map_err(|_| Error::Format(format!("bad threshold `{t}`")))?,
                        left: 0,
                        right: 0,
                    }
                }
                _ => return Err(Error::Format(format!("bad node line `{}`", line.trim()))),
            });
        }
        trees.push(link_preorder(raw)?);
    }
    Ok(BoostedEnsemble {
        base_score,
        learning_rate,
        n_features,
        trees,
    })
}

fn kv(lines: &mut std::str::Lines<'_>, key: &str) -> Result<String> {
    let line = lines.next().ok_or_else(|| Error::Format(format!("missing `{key}`")))?;
    match line.trim().split_once(' ') {
        Some((k, v)) if k == key => Ok(v.to_string()),
        _ => Err(Error::Format(format!("expected `{key}`, found `{}`", line.trim()))),
    }
}

/// Fill child indices of a preorder node list.
fn link_preorder(mut nodes: Vec<Node>) -> Result<RegressionTree> {
    fn walk(nodes: &mut [Node], i: usize) -> Result<usize> {
        match nodes.get(i).copied() {
            None => Err(Error::Format("tree ends inside a split".into())),
            Some(Node::Leaf { .. }) => Ok(i + 1),
            Some(Node::Split { feature, threshold, .. }) => {
                let left = i + 1;
                let right = walk(nodes, left)?;
                let end = walk(nodes, right)?;
                nodes[i] = Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
                Ok(end)
            }
        }
    }
    let end = walk(&mut nodes, 0)?;
    if end != nodes.len() {
        return Err(Error::Format("extra nodes after tree".into()));
    }
    Ok(RegressionTree { nodes })
}

pub(super) fn save_hybrid(m: &HybridModel) -> String {
    let additive = m.additive.save();
    let mut w = Writer::new(HYBRID_MAGIC);
    let lags: Vec<String> = m.lags.iter().map(|l| l.to_string()).collect();
    w.field("lags", lags.join(" "))
        .floats("history_tail", &m.history_tail)
        .field("additive_lines", additive.lines().count());
    let mut out = w.finish();
    out.push_str(&additive);
    out.push_str(&save_ensemble(&m.booster));
    out
}

pub(super) fn load_hybrid(text: &str) -> Result<HybridModel> {
    let mut r = Reader::new(text, HYBRID_MAGIC)?;
    let lags = r
        .field("lags")?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Format(format!("bad lag `{t}`"))))
        .collect::<Result<Vec<usize>>>()?;
    let history_tail = r.floats("history_tail")?;
    let n: usize = r.parse("additive_lines")?;
    let rest: Vec<&str> = text.lines().skip(4).collect();
    if rest.len() < n {
        return Err(Error::Format("truncated hybrid model".into()));
    }
    let additive = AdditiveModel::load(&rest[..n].join("\n"))?;
    let booster = load_ensemble(&rest[n..].join("\n"))?;
    Ok(HybridModel {
        additive,
        booster,
        lags,
        history_tail,
    })
}

//! Histogram binning, leaf-wise tree growth and the boosting loop.

use crate::{Error, Matrix, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostConfig {
    pub n_trees: usize,
    pub max_leaves: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// L2 penalty `λ` added to leaf counts.
    pub l2_leaf_penalty: f64,
    /// Shrinkage `η` applied to every tree.
    pub learning_rate: f64,
    pub max_bins: usize,
}

impl Default for BoostConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_leaves: 15,
            max_depth: 8,
            min_samples_leaf: 10,
            l2_leaf_penalty: 1.0,
            learning_rate: 0.1,
            max_bins: 64,
        }
    }
}

impl BoostConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 || self.max_leaves == 0 || self.min_samples_leaf == 0 || self.max_depth == 0 {
            return Err(Error::Config("n_trees, max_leaves, max_depth and min_samples_leaf must be ≥ 1".into()));
        }
        if self.max_bins < 2 {
            return Err(Error::Config("max_bins must be ≥ 2".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::Config("learning_rate must lie in (0, 1]".into()));
        }
        if !(self.l2_leaf_penalty >= 0.0 && self.l2_leaf_penalty.is_finite()) {
            return Err(Error::Config("l2_leaf_penalty must be finite and ≥ 0".into()));
        }
        Ok(())
    }
}

/// Per-feature split candidates. A value `x` falls in bin
/// `#{c ∈ cuts : c < x}`; splitting after bin `b` sends `x ≤ cuts[b]` left.
#[derive(Debug, Clone, PartialEq)]
pub struct BinMapper {
    pub cuts: Vec<Vec<f64>>,
}

impl BinMapper {
    /// Equal-frequency cuts placed midway between neighbouring distinct
    /// values. With at most `max_bins` distinct values every gap is a cut.
    pub fn fit(features: &Matrix, max_bins: usize) -> Self {
        let n = features.rows();
        let cuts = (0..features.cols())
            .map(|j| {
                let mut col = features.column(j);
                col.sort_by(f64::total_cmp);
                let mut distinct: Vec<(f64, usize)> = Vec::new();
                for v in col {
                    match distinct.last_mut() {
                        Some((last, count)) if *last == v => *count += 1,
                        _ => distinct.push((v, 1)),
                    }
                }
                let mid = |i: usize| (distinct[i].0 + distinct[i + 1].0) / 2.0;
                if distinct.len() <= max_bins {
                    return (0..distinct.len().saturating_sub(1)).map(mid).collect();
                }
                let mut cuts = Vec::new();
                let mut cumulative = 0;
                let mut next = 1;
                for i in 0..distinct.len() - 1 {
                    cumulative += distinct[i].1;
                    if next < max_bins && cumulative as f64 >= next as f64 * n as f64 / max_bins as f64 {
                        cuts.push(mid(i));
                        while next < max_bins && cumulative as f64 >= next as f64 * n as f64 / max_bins as f64 {
                            next += 1;
                        }
                    }
                }
                cuts
            })
            .collect();
        Self { cuts }
    }

    pub fn bin(&self, feature: usize, x: f64) -> usize {
        self.cuts[feature].partition_point(|&c| c < x)
    }

    pub fn n_bins(&self, feature: usize) -> usize {
        self.cuts[feature].len() + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// Binary regression tree stored as a node arena rooted at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Same tree with nodes renumbered in preorder (left subtree first).
    pub fn to_preorder(&self) -> Self {
        fn walk(src: &[Node], i: usize, out: &mut Vec<Node>) -> usize {
            let at = out.len();
            match src[i] {
                Node::Leaf { value } => out.push(Node::Leaf { value }),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    out.push(Node::Leaf { value: 0.0 });
                    let l = walk(src, left, out);
                    let r = walk(src, right, out);
                    out[at] = Node::Split {
                        feature,
                        threshold,
                        left: l,
                        right: r,
                    };
                }
            }
            at
        }
        let mut nodes = Vec::with_capacity(self.nodes.len());
        walk(&self.nodes, 0, &mut nodes);
        Self { nodes }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

/// Best split found for a set of rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub bin: usize,
    pub threshold: f64,
    pub gain: f64,
}

pub(crate) fn score(sum: f64, count: usize, lambda: f64) -> f64 {
    let denom = count as f64 + lambda;
    if denom > 0.0 {
        sum * sum / denom
    } else {
        0.0
    }
}

/// Best variance-reduction split over the histogram bin boundaries.
/// Ties go to the lowest feature index, then the lowest bin.
pub fn find_best_split(
    bins: &BinMapper,
    binned: &[Vec<usize>],
    residuals: &[f64],
    rows: &[usize],
    cfg: &BoostConfig,
) -> Option<Split> {
    let total: f64 = rows.iter().map(|&r| residuals[r]).sum();
    let n = rows.len();
    let parent = score(total, n, cfg.l2_leaf_penalty);
    let mut best: Option<Split> = None;
    for (f, feature_bins) in binned.iter().enumerate() {
        let nb = bins.n_bins(f);
        if nb < 2 {
            continue;
        }
        let mut sums = vec![0.0; nb];
        let mut counts = vec![0usize; nb];
        for &r in rows {
            sums[feature_bins[r]] += residuals[r];
            counts[feature_bins[r]] += 1;
        }
        let (mut left_sum, mut left_n) = (0.0, 0);
        for b in 0..nb - 1 {
            left_sum += sums[b];
            left_n += counts[b];
            let right_n = n - left_n;
            if left_n < cfg.min_samples_leaf || right_n < cfg.min_samples_leaf {
                continue;
            }
            let gain = score(left_sum, left_n, cfg.l2_leaf_penalty) + score(total - left_sum, right_n, cfg.l2_leaf_penalty) - parent;
            if gain > 0.0 && best.is_none_or(|s| gain > s.gain) {
                best = Some(Split {
                    feature: f,
                    bin: b,
                    threshold: bins.cuts[f][b],
                    gain,
                });
            }
        }
    }
    best
}

struct OpenLeaf {
    node: usize,
    rows: Vec<usize>,
    depth: usize,
    split: Option<Split>,
}

fn grow_tree(bins: &BinMapper, binned: &[Vec<usize>], residuals: &[f64], cfg: &BoostConfig) -> RegressionTree {
    let leaf_value = |rows: &[usize]| {
        let s: f64 = rows.iter().map(|&r| residuals[r]).sum();
        s / (rows.len() as f64 + cfg.l2_leaf_penalty)
    };
    let all: Vec<usize> = (0..residuals.len()).collect();
    let mut nodes = vec![Node::Leaf { value: leaf_value(&all) }];
    let candidate = |rows: &[usize], depth: usize| {
        if depth < cfg.max_depth {
            find_best_split(bins, binned, residuals, rows, cfg)
        } else {
            None
        }
    };
    let mut open = vec![OpenLeaf {
        node: 0,
        split: candidate(&all, 0),
        rows: all,
        depth: 0,
    }];
    let mut leaves = 1;
    while leaves < cfg.max_leaves {
        // best-gain-first; earlier leaves win ties
        let mut pick: Option<usize> = None;
        for (i, leaf) in open.iter().enumerate() {
            if let Some(s) = leaf.split {
                if pick.is_none_or(|p| s.gain > open[p].split.map_or(f64::NEG_INFINITY, |q| q.gain)) {
                    pick = Some(i);
                }
            }
        }
        let Some(i) = pick else { break };
        let leaf = open.remove(i);
        let split = leaf.split.expect("picked leaf has a split");
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            leaf.rows.iter().partition(|&&r| binned[split.feature][r] <= split.bin);
        let left = nodes.len();
        nodes.push(Node::Leaf {
            value: leaf_value(&left_rows),
        });
        nodes.push(Node::Leaf {
            value: leaf_value(&right_rows),
        });
        nodes[leaf.node] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right: left + 1,
        };
        let depth = leaf.depth + 1;
        open.insert(
            i,
            OpenLeaf {
                node: left + 1,
                split: candidate(&right_rows, depth),
                rows: right_rows,
                depth,
            },
        );
        open.insert(
            i,
            OpenLeaf {
                node: left,
                split: candidate(&left_rows, depth),
                rows: left_rows,
                depth,
            },
        );
        leaves += 1;
    }
    RegressionTree { nodes }.to_preorder()
}

/// `base_score + η · Σ_k tree_k(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostedEnsemble {
    pub base_score: f64,
    pub learning_rate: f64,
    pub n_features: usize,
    pub trees: Vec<RegressionTree>,
}

impl BoostedEnsemble {
    pub fn predict_row(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.n_features {
            return Err(Error::Dimension(format!(
                "feature row has {} values, ensemble expects {}",
                row.len(),
                self.n_features
            )));
        }
        Ok(self.base_score + self.learning_rate * self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>())
    }

    pub fn predict(&self, features: &Matrix) -> Result<Vec<f64>> {
        (0..features.rows()).map(|i| self.predict_row(features.row(i))).collect()
    }
}

/// Gradient boosting with squared loss: each tree fits the current residuals.
pub fn fit_booster(features: &Matrix, targets: &[f64], cfg: &BoostConfig) -> Result<BoostedEnsemble> {
    cfg.validate()?;
    let n = targets.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    if features.rows() != n {
        return Err(Error::Dimension(format!("{} feature rows for {} targets", features.rows(), n)));
    }
    if n < 2 * cfg.min_samples_leaf {
        return Err(Error::TooShort {
            needed: 2 * cfg.min_samples_leaf,
            actual: n,
        });
    }
    if features.as_slice().iter().chain(targets).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("booster training data".into()));
    }
    let base_score = targets.iter().sum::<f64>() / n as f64;
    let mut ensemble = BoostedEnsemble {
        base_score,
        learning_rate: cfg.learning_rate,
        n_features: features.cols(),
        trees: Vec::new(),
    };
    let bins = BinMapper::fit(features, cfg.max_bins);
    if (0..features.cols()).all(|f| bins.n_bins(f) < 2) {
        return Ok(ensemble);
    }
    let binned: Vec<Vec<usize>> = (0..features.cols())
        .map(|f| (0..n).map(|r| bins.bin(f, features.get(r, f))).collect())
        .collect();
    let mut prediction = vec![base_score; n];
    for _ in 0..cfg.n_trees {
        let residuals: Vec<f64> = targets.iter().zip(&prediction).map(|(y, p)| y - p).collect();
        let tree = grow_tree(&bins, &binned, &residuals, cfg);
        for (r, p) in prediction.iter_mut().enumerate() {
            *p += cfg.learning_rate * tree.predict_row(features.row(r));
        }
        ensemble.trees.push(tree);
    }
    Ok(ensemble)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n_trees: usize, max_leaves: usize, learning_rate: f64, lambda: f64) -> BoostConfig {
        BoostConfig {
            n_trees,
            max_leaves,
            min_samples_leaf: 1,
            l2_leaf_penalty: lambda,
            learning_rate,
            ..BoostConfig::default()
        }
    }

    #[test]
    fn single_leaf_predicts_mean() {
        let x = Matrix::from_vec(4, 1, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = [1.0, 5.0, 2.0, 8.0];
        let e = fit_booster(&x, &y, &cfg(1, 1, 1.0, 0.0)).unwrap();
        for p in e.predict(&x).unwrap() {
            assert!((p - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn one_split_fits_step() {
        let xs: Vec<f64> = (-5..5).map(|v| v as f64 + 0.5).collect();
        let y: Vec<f64> = xs.iter().map(|&v| if v < 0.0 { 0.0 } else { 10.0 }).collect();
        let x = Matrix::from_vec(10, 1, xs).unwrap();
        let e = fit_booster(&x, &y, &cfg(1, 2, 1.0, 0.0)).unwrap();
        let p = e.predict(&x).unwrap();
        let mse: f64 = p.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / 10.0;
        assert!(mse < 1e-20);
        assert_eq!(e.trees[0].n_leaves(), 2);
    }

    #[test]
    fn constant_features_give_base_only() {
        let x = Matrix::from_vec(6, 2, vec![1.0; 12]).unwrap();
        let e = fit_booster(&x, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &cfg(5, 4, 0.5, 0.0)).unwrap();
        assert!(e.trees.is_empty());
        assert_eq!(e.predict_row(&[0.0, 0.0]).unwrap(), 3.5);
    }

    #[test]
    fn errors() {
        let x = Matrix::from_vec(0, 1, vec![]).unwrap();
        assert!(matches!(fit_booster(&x, &[], &cfg(1, 2, 1.0, 0.0)), Err(Error::Empty)));
        let x = Matrix::from_vec(2, 1, vec![0.0, 1.0]).unwrap();
        let e = fit_booster(&x, &[0.0, 1.0], &cfg(1, 2, 1.0, 0.0)).unwrap();
        assert!(matches!(e.predict_row(&[1.0, 2.0]), Err(Error::Dimension(_))));
    }

    #[test]
    fn linearity_of_learning_rate() {
        let tree = RegressionTree {
            nodes: vec![Node::Leaf { value: 4.0 }],
        };
        let e = BoostedEnsemble {
            base_score: 1.0,
            learning_rate: 0.5,
            n_features: 1,
            trees: vec![tree],
        };
        assert_eq!(e.predict_row(&[0.0]).unwrap(), 3.0);
        let empty = BoostedEnsemble { trees: vec![], ..e };
        assert_eq!(empty.predict_row(&[9.0]).unwrap(), 1.0);
    }

    #[test]
    fn equal_frequency_cuts() {
        let x = Matrix::from_vec(100, 1, (0..100).map(|v| v as f64).collect()).unwrap();
        let b = BinMapper::fit(&x, 4);
        assert_eq!(b.cuts[0], vec![24.5, 49.5, 74.5]);
        let small = BinMapper::fit(&Matrix::from_vec(3, 1, vec![3.0, 1.0, 1.0]).unwrap(), 4);
        assert_eq!(small.cuts[0], vec![2.0]);
        assert_eq!(small.bin(0, 1.0), 0);
        assert_eq!(small.bin(0, 3.0), 1);
    }
}

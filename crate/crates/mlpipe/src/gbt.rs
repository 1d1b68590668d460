use serde::{Deserialize, Serialize};

use crate::error::{check_matrix, MlError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_child_rows: usize,
}

impl Default for GbtParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: 3,
            learning_rate: 0.1,
            min_child_rows: 1,
        }
    }
}

impl GbtParams {
    pub(crate) fn validate(&self) -> Result<(), MlError> {
        if self.n_trees == 0 || self.max_depth == 0 || self.min_child_rows == 0 {
            return Err(MlError::InvalidParams(
                "n_trees, max_depth and min_child_rows must be positive".into(),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(MlError::InvalidParams(format!("learning rate {}", self.learning_rate)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GbtNode {
    Leaf {
        value: f64,
    },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<GbtNode>,
}

impl RegressionTree {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                GbtNode::Leaf { value } => return value,
                GbtNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }
}

/// Least-squares gradient boosting: `base_score + learning_rate * sum(tree(x))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub base_score: f64,
    pub learning_rate: f64,
    pub n_features: usize,
    pub trees: Vec<RegressionTree>,
}

impl GbtModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.base_score + self.learning_rate * self.trees.iter().map(|t| t.predict(row)).sum::<f64>()
    }

    /// The model made of the first `n` trees (identical to training with `n_trees = n`).
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            trees: self.trees[..n.min(self.trees.len())].to_vec(),
            ..self.clone()
        }
    }
}

pub fn gbt_predict(model: &GbtModel, x: &[Vec<f64>]) -> Result<Vec<f64>, MlError> {
    if let Some(row) = x.iter().find(|r| r.len() != model.n_features) {
        return Err(MlError::Shape(format!(
            "row has {} values, model expects {}",
            row.len(),
            model.n_features
        )));
    }
    Ok(x.iter().map(|r| model.predict_row(r)).collect())
}

#[derive(Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

/// Fits a boosted ensemble to real-valued targets (0/1 class labels in
/// practice). Deterministic: trees use exact greedy splits over all rows and
/// features, so no seed is involved.
pub fn gbt_train(x: &[Vec<f64>], y: &[f64], params: &GbtParams) -> Result<GbtModel, MlError> {
    params.validate()?;
    let p = check_matrix(x, y.len())?;
    if y.iter().any(|v| !v.is_finite()) {
        return Err(MlError::InvalidParams("non-finite target".into()));
    }
    let n = y.len();
    let order: Vec<Vec<usize>> = (0..p)
        .map(|f| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
            idx
        })
        .collect();
    let base_score = y.iter().sum::<f64>() / n as f64;
    let mut pred = vec![base_score; n];
    let mut trees = Vec::with_capacity(params.n_trees);
    for _ in 0..params.n_trees {
        let residual: Vec<f64> = y.iter().zip(&pred).map(|(t, p)| t - p).collect();
        let (tree, leaf_of) = fit_tree(x, &residual, &order, params);
        for i in 0..n {
            if let GbtNode::Leaf { value } = tree.nodes[leaf_of[i]] {
                pred[i] += params.learning_rate * value;
            }
        }
        trees.push(tree);
    }
    Ok(GbtModel {
        base_score,
        learning_rate: params.learning_rate,
        n_features: p,
        trees,
    })
}

/// Grows one tree level by level; returns it with each row's leaf index.
fn fit_tree(x: &[Vec<f64>], r: &[f64], order: &[Vec<usize>], params: &GbtParams) -> (RegressionTree, Vec<usize>) {
    let n = r.len();
    let min_child = params.min_child_rows;
    let mut nodes = vec![GbtNode::Leaf { value: 0.0 }];
    let mut node_of = vec![0usize; n];
    let mut active = vec![0usize];
    // per node (count, sum)
    let mut stats = vec![(n, r.iter().sum::<f64>())];

    for _ in 0..params.max_depth {
        if active.is_empty() {
            break;
        }
        let mut slot = vec![usize::MAX; nodes.len()];
        for (s, &node) in active.iter().enumerate() {
            slot[node] = s;
        }
        let mut best: Vec<Option<Candidate>> = vec![None; active.len()];
        for (f, idx) in order.iter().enumerate() {
            // running left (count, sum, last value) per active node
            let mut left: Vec<(usize, f64, f64)> = vec![(0, 0.0, f64::NEG_INFINITY); active.len()];
            for &i in idx {
                let s = slot[node_of[i]];
                if s == usize::MAX {
                    continue;
                }
                let v = x[i][f];
                let (lc, ls, last) = left[s];
                let (tc, ts) = stats[active[s]];
                if lc >= min_child && tc - lc >= min_child && v > last {
                    let rc = tc - lc;
                    let gain = ls * ls / lc as f64 + (ts - ls) * (ts - ls) / rc as f64 - ts * ts / tc as f64;
                    if best[s].is_none_or(|b| gain > b.gain) {
                        let mid = last + (v - last) / 2.0;
                        best[s] = Some(Candidate {
                            gain,
                            feature: f,
                            threshold: if mid < v { mid } else { last },
                        });
                    }
                }
                left[s] = (lc + 1, ls + r[i], v);
            }
        }
        let mut next = Vec::new();
        let mut children = vec![None; active.len()];
        for (s, &node) in active.iter().enumerate() {
            let Some(c) = best[s].filter(|c| c.gain > 1e-12) else {
                continue;
            };
            let (l, rt) = (nodes.len(), nodes.len() + 1);
            nodes.push(GbtNode::Leaf { value: 0.0 });
            nodes.push(GbtNode::Leaf { value: 0.0 });
            stats.push((0, 0.0));
            stats.push((0, 0.0));
            nodes[node] = GbtNode::Split {
                feature: c.feature,
                threshold: c.threshold,
                left: l,
                right: rt,
            };
            children[s] = Some((c, l, rt));
            next.extend([l, rt]);
        }
        for i in 0..n {
            let s = slot[node_of[i]];
            if s == usize::MAX {
                continue;
            }
            if let Some((c, l, rt)) = children[s] {
                let child = if x[i][c.feature] <= c.threshold { l } else { rt };
                node_of[i] = child;
                stats[child].0 += 1;
                stats[child].1 += r[i];
            }
        }
        active = next;
    }
    for (node, &(count, sum)) in stats.iter().enumerate() {
        if let GbtNode::Leaf { value } = &mut nodes[node] {
            *value = if count == 0 { 0.0 } else { sum / count as f64 };
        }
    }
    (RegressionTree { nodes }, node_of)
}

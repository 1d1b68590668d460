use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_matrix, class_counts, MlError};

pub const MIN_ROWS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfParams {
    pub n_trees: usize,
    /// Features tried per split; `None` means `floor(sqrt(p))`.
    pub max_features: Option<usize>,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Features are quantile-binned into at most this many bins (<= 256).
    pub max_bins: usize,
}

impl Default for RfParams {
    fn default() -> Self {
        Self {
            n_trees: 500,
            max_features: None,
            max_depth: None,
            min_samples_leaf: 1,
            max_bins: 64,
        }
    }
}

/// Column-major bin codes plus the cut points that define them:
/// `bin(x)` is the number of cuts strictly below `x`.
#[derive(Debug, Clone)]
pub(crate) struct BinnedMatrix {
    pub(crate) codes: Vec<Vec<u8>>,
    pub(crate) cuts: Vec<Vec<f64>>,
}

fn column_cuts(col: &[f64], max_bins: usize) -> Vec<f64> {
    let mut sorted = col.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut uniq = sorted.clone();
    uniq.dedup();
    if uniq.len() <= max_bins {
        return uniq.windows(2).map(|w| w[0] + (w[1] - w[0]) / 2.0).collect();
    }
    let n = sorted.len();
    let mut cuts: Vec<f64> = (1..max_bins).map(|b| sorted[(b * n) / max_bins - 1]).collect();
    cuts.dedup();
    cuts
}

pub(crate) fn bin_of(cuts: &[f64], x: f64) -> u8 {
    cuts.partition_point(|&c| c < x) as u8
}

impl BinnedMatrix {
    pub(crate) fn new(x: &[Vec<f64>], max_bins: usize) -> Self {
        let p = x[0].len();
        let mut codes = Vec::with_capacity(p);
        let mut cuts = Vec::with_capacity(p);
        for j in 0..p {
            let col: Vec<f64> = x.iter().map(|r| r[j]).collect();
            let c = column_cuts(&col, max_bins);
            codes.push(col.iter().map(|&v| bin_of(&c, v)).collect());
            cuts.push(c);
        }
        Self { codes, cuts }
    }

    pub(crate) fn n_features(&self) -> usize {
        self.codes.len()
    }

    pub(crate) fn n_rows(&self) -> usize {
        self.codes.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf {
        p1: f64,
    },
    Split {
        feature: usize,
        bin: u8,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, codes: impl Fn(usize) -> u8) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { p1 } => return p1,
                Node::Split {
                    feature,
                    bin,
                    left,
                    right,
                } => i = if codes(feature) <= bin { left } else { right },
            }
        }
    }
}

/// Bagged Gini classification trees.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    trees: Vec<Tree>,
    cuts: Vec<Vec<f64>>,
    importances: Vec<f64>,
}

impl RandomForest {
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn n_features(&self) -> usize {
        self.cuts.len()
    }

    /// Mean-decrease-in-impurity importances, summing to 1.
    pub fn importances(&self) -> &[f64] {
        &self.importances
    }

    /// Mean leaf class-1 fraction over trees.
    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        let codes: Vec<u8> = row.iter().zip(&self.cuts).map(|(&v, c)| bin_of(c, v)).collect();
        self.trees.iter().map(|t| t.predict(|f| codes[f])).sum::<f64>() / self.trees.len() as f64
    }
}

pub fn rf_fit(x: &[Vec<f64>], y: &[u8], params: &RfParams, seed: u64) -> Result<RandomForest, MlError> {
    check_inputs(x, y, params)?;
    let binned = BinnedMatrix::new(x, params.max_bins);
    Ok(fit_binned(&binned, y, params, seed))
}

pub fn rf_importance(forest: &RandomForest) -> Vec<f64> {
    forest.importances.clone()
}

pub(crate) fn check_inputs(x: &[Vec<f64>], y: &[u8], params: &RfParams) -> Result<(), MlError> {
    check_matrix(x, y.len())?;
    if y.len() < MIN_ROWS {
        return Err(MlError::TooFewRows {
            rows: y.len(),
            min: MIN_ROWS,
        });
    }
    class_counts(y)?;
    if params.n_trees == 0 || params.min_samples_leaf == 0 || params.max_features == Some(0) {
        return Err(MlError::InvalidParams(
            "n_trees, min_samples_leaf and max_features must be positive".into(),
        ));
    }
    if !(2..=256).contains(&params.max_bins) {
        return Err(MlError::InvalidParams(format!(
            "max_bins {} must be in 2..=256",
            params.max_bins
        )));
    }
    Ok(())
}

pub(crate) fn fit_binned(data: &BinnedMatrix, y: &[u8], params: &RfParams, seed: u64) -> RandomForest {
    let p = data.n_features();
    let mtry = params
        .max_features
        .unwrap_or_else(|| (p as f64).sqrt().floor() as usize)
        .clamp(1, p);
    let grown: Vec<(Tree, Vec<f64>)> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            grow_tree(data, y, params, mtry, &mut rng)
        })
        .collect();
    let mut importances = vec![0.0; p];
    let mut trees = Vec::with_capacity(grown.len());
    for (tree, imp) in grown {
        let total: f64 = imp.iter().sum();
        if total > 0.0 {
            for (acc, v) in importances.iter_mut().zip(&imp) {
                *acc += v / total;
            }
        }
        trees.push(tree);
    }
    let total: f64 = importances.iter().sum();
    if total > 0.0 {
        importances.iter_mut().for_each(|v| *v /= total);
    } else {
        importances.fill(1.0 / p as f64);
    }
    RandomForest {
        trees,
        cuts: data.cuts.clone(),
        importances,
    }
}

struct Pending {
    node: usize,
    start: usize,
    end: usize,
    depth: usize,
}

fn grow_tree(data: &BinnedMatrix, y: &[u8], params: &RfParams, mtry: usize, rng: &mut ChaCha8Rng) -> (Tree, Vec<f64>) {
    let n = data.n_rows();
    let p = data.n_features();
    let mut samples: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    let mut features: Vec<usize> = (0..p).collect();
    let mut hist = vec![[0u32; 2]; 256];
    let mut importance = vec![0.0; p];
    let mut nodes = vec![Node::Leaf { p1: 0.0 }];
    let mut stack = vec![Pending {
        node: 0,
        start: 0,
        end: n,
        depth: 0,
    }];
    let min_leaf = params.min_samples_leaf as u32;

    while let Some(job) = stack.pop() {
        let idx = &mut samples[job.start..job.end];
        let m = idx.len() as u32;
        let c1 = idx.iter().filter(|&&i| y[i] == 1).count() as u32;
        let c0 = m - c1;
        nodes[job.node] = Node::Leaf {
            p1: f64::from(c1) / f64::from(m),
        };
        if c0 == 0 || c1 == 0 || m < 2 * min_leaf || params.max_depth.is_some_and(|d| job.depth >= d) {
            continue;
        }
        let parent = (f64::from(c0).powi(2) + f64::from(c1).powi(2)) / f64::from(m);

        // visit features in random order until `mtry` have been tried and a split exists
        let mut best: Option<(f64, usize, u8)> = None;
        for k in 0..p {
            if k >= mtry && best.is_some() {
                break;
            }
            let r = rng.random_range(k..p);
            features.swap(k, r);
            let f = features[k];
            let codes = &data.codes[f];
            let nb = data.cuts[f].len() + 1;
            hist[..nb].fill([0, 0]);
            for &i in idx.iter() {
                hist[codes[i] as usize][y[i] as usize] += 1;
            }
            let (mut l0, mut l1) = (0u32, 0u32);
            for (b, h) in hist[..nb - 1].iter().enumerate() {
                l0 += h[0];
                l1 += h[1];
                let ln = l0 + l1;
                if ln < min_leaf {
                    continue;
                }
                let rn = m - ln;
                if rn < min_leaf {
                    break;
                }
                if h[0] + h[1] == 0 {
                    continue;
                }
                let (r0, r1) = (c0 - l0, c1 - l1);
                let score = (f64::from(l0).powi(2) + f64::from(l1).powi(2)) / f64::from(ln)
                    + (f64::from(r0).powi(2) + f64::from(r1).powi(2)) / f64::from(rn);
                if best.is_none_or(|(s, _, _)| score > s) {
                    best = Some((score, f, b as u8));
                }
            }
        }
        let Some((score, feature, bin)) = best else {
            continue;
        };
        importance[feature] += (score - parent).max(0.0);

        let codes = &data.codes[feature];
        let mut split = 0;
        for i in 0..idx.len() {
            if codes[idx[i]] <= bin {
                idx.swap(i, split);
                split += 1;
            }
        }
        let (left, right) = (nodes.len(), nodes.len() + 1);
        nodes.push(Node::Leaf { p1: 0.0 });
        nodes.push(Node::Leaf { p1: 0.0 });
        nodes[job.node] = Node::Split {
            feature,
            bin,
            left,
            right,
        };
        let mid = job.start + split;
        stack.push(Pending {
            node: right,
            start: mid,
            end: job.end,
            depth: job.depth + 1,
        });
        stack.push(Pending {
            node: left,
            start: job.start,
            end: mid,
            depth: job.depth + 1,
        });
    }
    (Tree { nodes }, importance)
}

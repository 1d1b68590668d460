use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use texharm_evalstats::auc_score;

use crate::error::{check_matrix, class_counts, MlError};
use crate::gbt::{gbt_train, GbtParams};

pub const DEFAULT_FOLDS: usize = 5;

pub fn default_grid() -> Vec<GbtParams> {
    let mut grid = Vec::with_capacity(54);
    for n_trees in [50, 100, 200] {
        for max_depth in [2, 3, 4] {
            for learning_rate in [0.05, 0.1, 0.3] {
                for min_child_rows in [1, 5] {
                    grid.push(GbtParams {
                        n_trees,
                        max_depth,
                        learning_rate,
                        min_child_rows,
                    });
                }
            }
        }
    }
    grid
}

/// Fold index per row. Each class is shuffled and dealt round-robin, so
/// every fold holds both classes once each class has at least `k` rows.
pub fn stratified_folds(y: &[u8], k: usize, seed: u64) -> Result<Vec<usize>, MlError> {
    if k < 2 {
        return Err(MlError::InvalidParams(format!("k_folds = {k}, need at least 2")));
    }
    let (negatives, positives) = class_counts(y)?;
    if negatives.min(positives) < k {
        return Err(MlError::TooFewRows {
            rows: negatives.min(positives),
            min: k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold = vec![0; y.len()];
    for class in 0..2u8 {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        idx.shuffle(&mut rng);
        for (pos, i) in idx.into_iter().enumerate() {
            fold[i] = pos % k;
        }
    }
    Ok(fold)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchResult {
    pub best: GbtParams,
    pub best_auc: f64,
    /// Mean validation AUC of every grid point, in grid order.
    pub scores: Vec<(GbtParams, f64)>,
}

fn targets(y: &[u8]) -> Vec<f64> {
    y.iter().map(|&l| f64::from(l)).collect()
}

/// Per-fold validation AUCs for several tree counts sharing the other
/// parameters; one model per fold is trained with the largest count and
/// evaluated on its prefixes.
fn fold_aucs(
    x: &[Vec<f64>],
    y: &[u8],
    folds: &[usize],
    k: usize,
    params: GbtParams,
    tree_counts: &[usize],
) -> Result<Vec<Vec<f64>>, MlError> {
    let max_trees = tree_counts.iter().copied().max().unwrap_or(0);
    (0..k)
        .into_par_iter()
        .map(|f| {
            let train: Vec<usize> = (0..y.len()).filter(|&i| folds[i] != f).collect();
            let valid: Vec<usize> = (0..y.len()).filter(|&i| folds[i] == f).collect();
            let xt: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
            let yt: Vec<u8> = train.iter().map(|&i| y[i]).collect();
            let model = gbt_train(
                &xt,
                &targets(&yt),
                &GbtParams {
                    n_trees: max_trees,
                    ..params
                },
            )?;
            let yv: Vec<u8> = valid.iter().map(|&i| y[i]).collect();
            let mut sums = vec![0.0; valid.len()];
            let mut done = 0;
            let mut sorted: Vec<(usize, usize)> = tree_counts.iter().copied().enumerate().collect();
            sorted.sort_by_key(|&(_, n)| n);
            let mut out = vec![0.0; tree_counts.len()];
            for (slot, n) in sorted {
                for tree in &model.trees[done..n] {
                    for (s, &i) in sums.iter_mut().zip(&valid) {
                        *s += tree.predict(&x[i]);
                    }
                }
                done = n;
                let scores: Vec<f64> = sums
                    .iter()
                    .map(|s| model.base_score + model.learning_rate * s)
                    .collect();
                out[slot] = auc_score(&scores, &yv)?;
            }
            Ok(out)
        })
        .collect()
}

/// Exhaustive search scored by mean stratified k-fold validation AUC. Ties
/// go to fewer trees, then shallower depth, then earlier grid position.
pub fn grid_search(
    x: &[Vec<f64>],
    y: &[u8],
    grid: &[GbtParams],
    k_folds: usize,
    seed: u64,
) -> Result<GridSearchResult, MlError> {
    if grid.is_empty() {
        return Err(MlError::InvalidParams("empty parameter grid".into()));
    }
    check_matrix(x, y.len())?;
    for p in grid {
        p.validate()?;
    }
    let folds = stratified_folds(y, k_folds, seed)?;

    // group points that differ only in n_trees
    let mut groups: Vec<(GbtParams, Vec<usize>)> = Vec::new();
    for (g, p) in grid.iter().enumerate() {
        let key = GbtParams { n_trees: 0, ..*p };
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(g),
            None => groups.push((key, vec![g])),
        }
    }
    let mut mean_auc = vec![0.0; grid.len()];
    for (key, members) in &groups {
        let counts: Vec<usize> = members.iter().map(|&g| grid[g].n_trees).collect();
        let per_fold = fold_aucs(x, y, &folds, k_folds, *key, &counts)?;
        for (m, &g) in members.iter().enumerate() {
            mean_auc[g] = per_fold.iter().map(|a| a[m]).sum::<f64>() / k_folds as f64;
        }
    }

    let mut best = 0;
    for g in 1..grid.len() {
        let (a, b) = (&grid[g], &grid[best]);
        let better = mean_auc[g] > mean_auc[best]
            || (mean_auc[g] == mean_auc[best] && (a.n_trees, a.max_depth) < (b.n_trees, b.max_depth));
        if better {
            best = g;
        }
    }
    Ok(GridSearchResult {
        best: grid[best],
        best_auc: mean_auc[best],
        scores: grid.iter().copied().zip(mean_auc).collect(),
    })
}

/// Out-of-fold scores: each row is predicted by the model trained without its fold.
pub fn cross_val_predict(
    x: &[Vec<f64>],
    y: &[u8],
    params: &GbtParams,
    k_folds: usize,
    seed: u64,
) -> Result<Vec<f64>, MlError> {
    check_matrix(x, y.len())?;
    let folds = stratified_folds(y, k_folds, seed)?;
    let mut out = vec![0.0; y.len()];
    for f in 0..k_folds {
        let train: Vec<usize> = (0..y.len()).filter(|&i| folds[i] != f).collect();
        let xt: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
        let yt: Vec<f64> = train.iter().map(|&i| f64::from(y[i])).collect();
        let model = gbt_train(&xt, &yt, params)?;
        for i in (0..y.len()).filter(|&i| folds[i] == f) {
            out[i] = model.predict_row(&x[i]);
        }
    }
    Ok(out)
}

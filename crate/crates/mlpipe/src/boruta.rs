use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::MlError;
use crate::forest::{check_inputs, fit_binned, BinnedMatrix, RfParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Confirmed,
    Tentative,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BorutaParams {
    pub max_iter: usize,
    pub alpha: f64,
    pub forest: RfParams,
}

impl Default for BorutaParams {
    fn default() -> Self {
        Self {
            max_iter: 100,
            alpha: 0.05,
            forest: RfParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BorutaResult {
    /// 1 for every confirmed feature, then 2, 3, ... for the rest.
    pub ranks: Vec<usize>,
    pub decisions: Vec<Decision>,
    pub hits: Vec<usize>,
    /// Iterations run before the feature's decision was made (or in total).
    pub trials: Vec<usize>,
    pub mean_importance: Vec<f64>,
    pub iterations: usize,
}

impl BorutaResult {
    pub fn confirmed(&self) -> Vec<usize> {
        (0..self.ranks.len())
            .filter(|&j| self.decisions[j] == Decision::Confirmed)
            .collect()
    }
}

/// `P(X <= k)` and `P(X >= k)` for `X ~ Binomial(n, 1/2)`.
fn binomial_tails(k: usize, n: usize) -> (f64, f64) {
    let mut pmf = Vec::with_capacity(n + 1);
    // ln C(n, i) accumulated incrementally keeps n up to a few thousand exact enough
    let mut ln_c = 0.0f64;
    for i in 0..=n {
        if i > 0 {
            ln_c += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        pmf.push((ln_c - n as f64 * std::f64::consts::LN_2).exp());
    }
    let lower: f64 = pmf[..=k].iter().sum();
    let upper: f64 = pmf[k..].iter().sum();
    (lower.min(1.0), upper.min(1.0))
}

/// Boruta all-relevant selection with random-forest importances.
///
/// Each iteration shuffles a shadow copy of every feature, fits a forest on
/// real + shadow columns and records a hit for each real feature beating the
/// best shadow. Tentative features are then tested
/// against Binomial(trials, 1/2), two-sided, Bonferroni-corrected over the
/// features tested in that iteration.
pub fn boruta(x: &[Vec<f64>], y: &[u8], params: &BorutaParams, seed: u64) -> Result<BorutaResult, MlError> {
    check_inputs(x, y, &params.forest)?;
    if !(params.alpha > 0.0 && params.alpha < 1.0) {
        return Err(MlError::InvalidParams(format!(
            "alpha {} must be in (0, 1)",
            params.alpha
        )));
    }
    let real = BinnedMatrix::new(x, params.forest.max_bins);
    let p = real.n_features();
    let mut decisions = vec![Decision::Tentative; p];
    let mut hits = vec![0usize; p];
    let mut trials = vec![0usize; p];
    let mut imp_sum = vec![0.0; p];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut iterations = 0;

    for iter in 0..params.max_iter {
        if !decisions.contains(&Decision::Tentative) {
            break;
        }
        iterations += 1;
        let mut codes = real.codes.clone();
        let mut cuts = real.cuts.clone();
        for j in 0..p {
            let mut shadow = real.codes[j].clone();
            shadow.shuffle(&mut rng);
            codes.push(shadow);
            cuts.push(real.cuts[j].clone());
        }
        let data = BinnedMatrix { codes, cuts };
        let forest_seed = seed ^ (iter as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let forest = fit_binned(&data, y, &params.forest, forest_seed);
        let imp = forest.importances();
        let shadow_max = imp[p..].iter().copied().fold(0.0, f64::max);
        for j in (0..p).filter(|&j| decisions[j] == Decision::Tentative) {
            trials[j] += 1;
            imp_sum[j] += imp[j];
            if imp[j] > shadow_max {
                hits[j] += 1;
            }
        }

        let tested: Vec<usize> = (0..p).filter(|&j| decisions[j] == Decision::Tentative).collect();
        let level = params.alpha / 2.0 / tested.len() as f64;
        for &j in &tested {
            let (lower, upper) = binomial_tails(hits[j], trials[j]);
            if upper < level {
                decisions[j] = Decision::Confirmed;
            } else if lower < level {
                decisions[j] = Decision::Rejected;
            }
        }
    }

    let mean_importance: Vec<f64> = (0..p)
        .map(|j| {
            if trials[j] == 0 {
                0.0
            } else {
                imp_sum[j] / trials[j] as f64
            }
        })
        .collect();
    let group = |d: Decision| match d {
        Decision::Confirmed => 0,
        Decision::Tentative => 1,
        Decision::Rejected => 2,
    };
    let mut order: Vec<usize> = (0..p).filter(|&j| decisions[j] != Decision::Confirmed).collect();
    order.sort_by(|&a, &b| {
        group(decisions[a])
            .cmp(&group(decisions[b]))
            .then(hits[b].cmp(&hits[a]))
            .then(mean_importance[b].total_cmp(&mean_importance[a]))
            .then(a.cmp(&b))
    });
    let mut ranks = vec![1usize; p];
    for (pos, &j) in order.iter().enumerate() {
        ranks[j] = pos + 2;
    }
    Ok(BorutaResult {
        ranks,
        decisions,
        hits,
        trials,
        mean_importance,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SelectionPolicy {
    /// Confirmed features, falling back to ranks below 10 when none is confirmed.
    #[default]
    #[serde(rename = "rank1")]
    Rank1,
    /// Every feature ranked below 10.
    #[serde(rename = "rank-lt-10")]
    RankLt10,
}

impl std::str::FromStr for SelectionPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rank1" => Ok(Self::Rank1),
            "rank-lt-10" => Ok(Self::RankLt10),
            other => Err(format!(
                "unknown selection policy {other:?} (expected rank1 or rank-lt-10)"
            )),
        }
    }
}

/// Selected feature indices (ascending) and whether the rank-1 policy had
/// to fall back.
pub fn select_features(result: &BorutaResult, policy: SelectionPolicy) -> (Vec<usize>, bool) {
    let below_10 = || (0..result.ranks.len()).filter(|&j| result.ranks[j] < 10).collect();
    match policy {
        SelectionPolicy::Rank1 => {
            let confirmed = result.confirmed();
            if confirmed.is_empty() {
                (below_10(), true)
            } else {
                (confirmed, false)
            }
        }
        SelectionPolicy::RankLt10 => (below_10(), false),
    }
}

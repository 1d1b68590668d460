//! Binary-classifier evaluation: ROC curves, AUC, Youden cutoffs and
//! confusion-matrix metrics. Label 1 is the positive class and a score at or
//! above the threshold predicts positive.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("{scores} scores but {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("both classes must be present (positives: {positives}, negatives: {negatives})")]
    SingleClass { positives: usize, negatives: usize },
    #[error("label {0} is not 0 or 1")]
    InvalidLabel(u8),
    #[error("score {0} is not finite")]
    NonFiniteScore(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    pub threshold: f64,
}

/// ROC points ordered by decreasing threshold, from (0, 0) at `+inf` to (1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    points: Vec<RocPoint>,
    positives: usize,
    negatives: usize,
}

fn check(scores: &[f64], labels: &[u8]) -> Result<(usize, usize), EvalError> {
    if scores.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    if let Some(&s) = scores.iter().find(|s| !s.is_finite()) {
        return Err(EvalError::NonFiniteScore(s));
    }
    if let Some(&l) = labels.iter().find(|&&l| l > 1) {
        return Err(EvalError::InvalidLabel(l));
    }
    let positives = labels.iter().filter(|&&l| l == 1).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(EvalError::SingleClass { positives, negatives });
    }
    Ok((positives, negatives))
}

impl RocCurve {
    pub fn points(&self) -> &[RocPoint] {
        &self.points
    }

    pub fn positives(&self) -> usize {
        self.positives
    }

    pub fn negatives(&self) -> usize {
        self.negatives
    }

    /// `fpr,tpr,threshold` rows; the sentinel threshold is written as `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fpr,tpr,threshold\n");
        for p in &self.points {
            let _ = writeln!(out, "{:?},{:?},{}", p.fpr, p.tpr, fmt_threshold(p.threshold));
        }
        out
    }
}

fn fmt_threshold(t: f64) -> String {
    if t == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{t:?}")
    }
}

/// Sweeps the threshold over every distinct score; tied scores form one step.
pub fn roc_curve(scores: &[f64], labels: &[u8]) -> Result<RocCurve, EvalError> {
    let (positives, negatives) = check(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut k = 0;
    while k < order.len() {
        let t = scores[order[k]];
        while k < order.len() && scores[order[k]] == t {
            if labels[order[k]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / negatives as f64,
            tpr: tp as f64 / positives as f64,
            threshold: t,
        });
    }
    Ok(RocCurve {
        points,
        positives,
        negatives,
    })
}

/// Trapezoidal area under the curve.
pub fn auc(curve: &RocCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum()
}

/// Convenience: AUC straight from scores and labels.
pub fn auc_score(scores: &[f64], labels: &[u8]) -> Result<f64, EvalError> {
    Ok(auc(&roc_curve(scores, labels)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoudenCutoff {
    pub threshold: f64,
    pub j: f64,
    pub tpr: f64,
    pub fpr: f64,
}

/// Threshold maximizing `J = TPR - FPR`. Among equal `J` the smallest
/// threshold wins, so a flat curve resolves to an observed score.
pub fn youden_cutoff(curve: &RocCurve) -> YoudenCutoff {
    let mut best: Option<YoudenCutoff> = None;
    for p in &curve.points {
        let j = p.tpr - p.fpr;
        // points run by decreasing threshold, so >= prefers the later one
        if best.is_none_or(|b| j >= b.j) {
            best = Some(YoudenCutoff {
                threshold: p.threshold,
                j,
                tpr: p.tpr,
                fpr: p.fpr,
            });
        }
    }
    best.expect("a ROC curve always has its sentinel point")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub fp: usize,
}

impl Confusion {
    pub fn at_threshold(scores: &[f64], labels: &[u8], threshold: f64) -> Result<Self, EvalError> {
        check(scores, labels)?;
        let mut c = Confusion {
            tp: 0,
            fn_: 0,
            tn: 0,
            fp: 0,
        };
        for (&s, &l) in scores.iter().zip(labels) {
            match (s >= threshold, l == 1) {
                (true, true) => c.tp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
                (true, false) => c.fp += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> usize {
        self.tp + self.fn_ + self.tn + self.fp
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    pub fn sensitivity(&self) -> f64 {
        self.tp as f64 / (self.tp + self.fn_) as f64
    }

    pub fn specificity(&self) -> f64 {
        self.tn as f64 / (self.tn + self.fp) as f64
    }

    pub fn f1(&self) -> f64 {
        let den = 2 * self.tp + self.fp + self.fn_;
        if den == 0 {
            0.0
        } else {
            2.0 * self.tp as f64 / den as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub auc: f64,
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub f1: f64,
    pub threshold: f64,
    pub confusion: Confusion,
}

impl MetricsReport {
    /// True when the rates agree exactly with the stored confusion matrix.
    pub fn is_consistent(&self) -> bool {
        let c = &self.confusion;
        self.accuracy == c.accuracy()
            && self.sensitivity == c.sensitivity()
            && self.specificity == c.specificity()
            && self.f1 == c.f1()
    }
}

pub fn classification_metrics(scores: &[f64], labels: &[u8], threshold: f64) -> Result<MetricsReport, EvalError> {
    let confusion = Confusion::at_threshold(scores, labels, threshold)?;
    Ok(MetricsReport {
        auc: auc_score(scores, labels)?,
        accuracy: confusion.accuracy(),
        sensitivity: confusion.sensitivity(),
        specificity: confusion.specificity(),
        f1: confusion.f1(),
        threshold,
        confusion,
    })
}

use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::io::write_atomic;
use crate::stats;

/// Per-feature divergence between two cohorts, with summary statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivergenceReport {
    /// Name of the divergence used (`paper_jsd` or `strict_jsd`).
    pub metric: String,
    pub cohort_a: String,
    pub cohort_b: String,
    pub n_bins: usize,
    /// Additive smoothing applied to every bin before normalization.
    pub smoothing: f64,
    /// Divergence in nats, in column order.
    pub per_feature: IndexMap<String, f64>,
    pub mean: f64,
    /// Population standard deviation over features.
    pub std: f64,
    pub median: f64,
}

impl DivergenceReport {
    pub fn new(
        metric: impl Into<String>,
        cohort_a: impl Into<String>,
        cohort_b: impl Into<String>,
        n_bins: usize,
        smoothing: f64,
        per_feature: IndexMap<String, f64>,
    ) -> Result<Self> {
        if per_feature.is_empty() {
            return Err(CoreError::invalid("divergence report", "no features"));
        }
        if let Some((name, v)) = per_feature.iter().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(CoreError::invalid(
                "divergence report",
                format!("feature `{name}` has invalid divergence {v}"),
            ));
        }
        let (mean, std, median) = summarize(&per_feature);
        Ok(Self {
            metric: metric.into(),
            cohort_a: cohort_a.into(),
            cohort_b: cohort_b.into(),
            n_bins,
            smoothing,
            per_feature,
            mean,
            std,
            median,
        })
    }

    /// True when the stored summaries equal those recomputed from `per_feature`.
    pub fn is_consistent(&self) -> bool {
        let (mean, std, median) = summarize(&self.per_feature);
        mean == self.mean && std == self.std && median == self.median
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s =
            serde_json::to_string_pretty(self).map_err(|e| CoreError::invalid("divergence report", e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CoreError::invalid("divergence report", e.to_string()))
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| CoreError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_json(&text).map_err(|e| CoreError::Format {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }
}

fn summarize(per_feature: &IndexMap<String, f64>) -> (f64, f64, f64) {
    let values: Vec<f64> = per_feature.values().copied().collect();
    (stats::mean(&values), stats::std_dev(&values), stats::median(&values))
}

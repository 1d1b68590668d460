use std::fmt::Write as _;

use indexmap::IndexMap;
use texharm_core::{DivergenceReport, FeatureTable};

use crate::distribution::{
    histogram, paper_jsd_with, pooled_edges, strict_jsd_with, DiscreteDistribution, DEFAULT_SMOOTHING,
};
use crate::error::HarmonizeError;

pub const DEFAULT_BINS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    /// Mean of the two directed KL divergences.
    #[default]
    PaperJsd,
    /// Mixture-based Jensen-Shannon divergence.
    StrictJsd,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::PaperJsd => "paper_jsd",
            Metric::StrictJsd => "strict_jsd",
        }
    }

    fn eval(self, p: &DiscreteDistribution, q: &DiscreteDistribution, eps: f64) -> Result<f64, HarmonizeError> {
        match self {
            Metric::PaperJsd => paper_jsd_with(p, q, eps),
            Metric::StrictJsd => strict_jsd_with(p, q, eps),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub n_bins: usize,
    pub smoothing: f64,
    pub metric: Metric,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            n_bins: DEFAULT_BINS,
            smoothing: DEFAULT_SMOOTHING,
            metric: Metric::PaperJsd,
        }
    }
}

/// Histograms of one feature for both cohorts over shared edges.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureHistogram {
    pub feature: String,
    pub a: DiscreteDistribution,
    pub b: DiscreteDistribution,
}

fn cohort_name(t: &FeatureTable) -> String {
    t.cohorts().join("+")
}

fn check_tables(a: &FeatureTable, b: &FeatureTable) -> Result<(), HarmonizeError> {
    if a.feature_names() != b.feature_names() {
        return Err(HarmonizeError::FeatureMismatch);
    }
    for t in [a, b] {
        if t.n_rows() == 0 {
            let name = if t.cohorts().is_empty() {
                "<unnamed>".to_string()
            } else {
                cohort_name(t)
            };
            return Err(HarmonizeError::EmptyCohort(name));
        }
    }
    Ok(())
}

/// Per-feature histograms over the pooled range of both cohorts.
pub fn feature_histograms(
    a: &FeatureTable,
    b: &FeatureTable,
    n_bins: usize,
) -> Result<Vec<FeatureHistogram>, HarmonizeError> {
    check_tables(a, b)?;
    (0..a.n_features())
        .map(|j| {
            let (xa, xb) = (a.column(j), b.column(j));
            let edges = pooled_edges(&xa, &xb, n_bins)?;
            Ok(FeatureHistogram {
                feature: a.feature_names()[j].clone(),
                a: histogram(&xa, &edges)?,
                b: histogram(&xb, &edges)?,
            })
        })
        .collect()
}

pub fn divergence_report(
    a: &FeatureTable,
    b: &FeatureTable,
    n_bins: usize,
) -> Result<DivergenceReport, HarmonizeError> {
    divergence_report_with(
        a,
        b,
        &ReportOptions {
            n_bins,
            ..Default::default()
        },
    )
}

pub fn divergence_report_with(
    a: &FeatureTable,
    b: &FeatureTable,
    opts: &ReportOptions,
) -> Result<DivergenceReport, HarmonizeError> {
    let hists = feature_histograms(a, b, opts.n_bins)?;
    report_from_histograms(&hists, &cohort_name(a), &cohort_name(b), opts)
}

pub fn report_from_histograms(
    hists: &[FeatureHistogram],
    cohort_a: &str,
    cohort_b: &str,
    opts: &ReportOptions,
) -> Result<DivergenceReport, HarmonizeError> {
    let mut per_feature = IndexMap::with_capacity(hists.len());
    for h in hists {
        per_feature.insert(h.feature.clone(), opts.metric.eval(&h.a, &h.b, opts.smoothing)?);
    }
    Ok(DivergenceReport::new(
        opts.metric.as_str(),
        cohort_a,
        cohort_b,
        opts.n_bins,
        opts.smoothing,
        per_feature,
    )?)
}

/// CSV with columns `feature,bin_lo,bin_hi,p_cohortA,p_cohortB`, one row per bin.
pub fn histograms_csv(hists: &[FeatureHistogram]) -> String {
    let mut out = String::from("feature,bin_lo,bin_hi,p_cohortA,p_cohortB\n");
    for h in hists {
        let e = h.a.edges();
        for (k, (pa, pb)) in h.a.probs().iter().zip(h.b.probs()).enumerate() {
            let _ = writeln!(out, "{},{:?},{:?},{:?},{:?}", h.feature, e[k], e[k + 1], pa, pb);
        }
    }
    out
}

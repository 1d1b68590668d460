//! Cohort-level harmonization measures: histogram divergences between two
//! cohorts' feature distributions, and a ComBat-style location/scale correction.

mod combat;
mod distribution;
mod error;
mod report;

pub use crate::combat::{combat_adjust, CombatModel};
pub use crate::distribution::{
    histogram, kl_divergence, paper_jsd, paper_jsd_with, pooled_edges, strict_jsd, strict_jsd_with,
    DiscreteDistribution, DEFAULT_SMOOTHING,
};
pub use crate::error::HarmonizeError;
pub use crate::report::{
    divergence_report, divergence_report_with, feature_histograms, histograms_csv, report_from_histograms,
    FeatureHistogram, Metric, ReportOptions, DEFAULT_BINS,
};

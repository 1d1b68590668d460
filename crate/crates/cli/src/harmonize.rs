use texharm_core::{DivergenceReport, FeatureTable};
use texharm_harmonize::{
    combat_adjust, feature_histograms, histograms_csv, report_from_histograms, Metric, ReportOptions, DEFAULT_SMOOTHING,
};

use crate::error::usage;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonizeOptions {
    pub n_bins: usize,
    pub strict_jsd: bool,
    pub combat: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceOutput {
    pub report: DivergenceReport,
    pub histograms_csv: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonizeOutput {
    pub before: DivergenceOutput,
    /// Same report after ComBat, when requested.
    pub combat: Option<DivergenceOutput>,
}

/// Splits a table holding exactly two cohorts into `(first, second)` by name order.
pub fn split_by_cohort(table: &FeatureTable) -> anyhow::Result<(FeatureTable, FeatureTable)> {
    let cohorts = table.cohorts();
    if cohorts.len() != 2 {
        return Err(usage(format!(
            "a single table must hold exactly two cohorts, found {}: {}",
            cohorts.len(),
            cohorts.join(", ")
        )));
    }
    Ok((
        table.filter_rows(|r| r.cohort == cohorts[0]),
        table.filter_rows(|r| r.cohort == cohorts[1]),
    ))
}

fn divergence(a: &FeatureTable, b: &FeatureTable, opts: &HarmonizeOptions) -> anyhow::Result<DivergenceOutput> {
    let ropts = ReportOptions {
        n_bins: opts.n_bins,
        smoothing: DEFAULT_SMOOTHING,
        metric: if opts.strict_jsd {
            Metric::StrictJsd
        } else {
            Metric::PaperJsd
        },
    };
    let hists = feature_histograms(a, b, ropts.n_bins)?;
    let name = |t: &FeatureTable| t.cohorts().join("+");
    Ok(DivergenceOutput {
        report: report_from_histograms(&hists, &name(a), &name(b), &ropts)?,
        histograms_csv: histograms_csv(&hists),
    })
}

pub fn harmonize_tables(
    a: &FeatureTable,
    b: &FeatureTable,
    opts: &HarmonizeOptions,
) -> anyhow::Result<HarmonizeOutput> {
    if a.feature_names() != b.feature_names() {
        return Err(usage("the two tables have different feature columns"));
    }
    let before = divergence(a, b, opts)?;
    let combat = if opts.combat {
        let adjusted = combat_adjust(&a.concat(b)?)?;
        let in_a = a.cohorts();
        let aa = adjusted.filter_rows(|r| in_a.contains(&r.cohort));
        let bb = adjusted.filter_rows(|r| !in_a.contains(&r.cohort));
        Some(divergence(&aa, &bb, opts)?)
    } else {
        None
    };
    Ok(HarmonizeOutput { before, combat })
}

mod common;

use std::sync::OnceLock;

use common::extract_synth as extract;
use statrs::distribution::{ContinuousCDF, Normal};
use texharm_cli::harmonize::split_by_cohort;
use texharm_cli::synth::{generate, SynthConfig};
use texharm_core::FeatureTable;
use texharm_harmonize::{divergence_report_with, Metric, ReportOptions, DEFAULT_SMOOTHING};

/// Raw and filtered features of the default benchmark.
fn benchmark() -> &'static (FeatureTable, FeatureTable) {
    static CELL: OnceLock<(FeatureTable, FeatureTable)> = OnceLock::new();
    CELL.get_or_init(|| {
        let cases = generate(&SynthConfig::default());
        (
            extract(&cases, None),
            extract(&cases, Some("synthetic:gaussian_random")),
        )
    })
}

/// Two-sided Mann-Whitney U p-value, normal approximation with tie correction.
fn mann_whitney(x: &[f64], y: &[f64]) -> f64 {
    let mut all: Vec<(f64, bool)> = x
        .iter()
        .map(|&v| (v, true))
        .chain(y.iter().map(|&v| (v, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = all.len();
    let (mut rank_x, mut tie_term, mut i) = (0.0, 0.0, 0);
    while i < n {
        let mut j = i;
        while j + 1 < n && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        rank_x += avg * all[i..=j].iter().filter(|p| p.1).count() as f64;
        i = j + 1;
    }
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let u = rank_x - n1 * (n1 + 1.0) / 2.0;
    let mu = n1 * n2 / 2.0;
    let nn = n1 + n2;
    let sigma = (n1 * n2 / 12.0 * (nn + 1.0 - tie_term / (nn * (nn - 1.0)))).sqrt();
    let z = (u - mu).abs() / sigma;
    2.0 * (1.0 - Normal::standard().cdf(z))
}

#[test]
fn mann_whitney_reference_values() {
    // exact U = 0 for fully separated samples of 5 and 5: z = 2.611, p = 0.00902
    let p = mann_whitney(&[1.0, 2.0, 3.0, 4.0, 5.0], &[6.0, 7.0, 8.0, 9.0, 10.0]);
    assert!((p - 0.009023).abs() < 1e-5, "{p}");
    assert!((mann_whitney(&[1.0, 2.0], &[1.0, 2.0]) - 1.0).abs() < 1e-12);
}

#[test]
fn classes_differ_in_glcm_contrast() {
    let (raw, _) = benchmark();
    let j = raw.feature_index("glcm_Contrast").unwrap();
    let pick = |cohort: &str, class: u8| -> Vec<f64> {
        raw.rows()
            .iter()
            .filter(|r| r.cohort == cohort && r.class_label == Some(class))
            .map(|r| r.values[j])
            .collect()
    };
    for cohort in ["scannerA", "scannerB"] {
        let (a, b) = (pick(cohort, 0), pick(cohort, 1));
        assert_eq!((a.len(), b.len()), (100, 100));
        let p = mann_whitney(&a, &b);
        assert!(p < 0.01, "{cohort}: p = {p}");
    }
}

fn mean_divergence(t: &FeatureTable, smoothing: f64) -> f64 {
    let (a, b) = split_by_cohort(t).unwrap();
    let opts = ReportOptions {
        n_bins: 15,
        smoothing,
        metric: Metric::PaperJsd,
    };
    divergence_report_with(&a, &b, &opts).unwrap().mean
}

#[test]
fn halving_smoothing_is_stable() {
    let (raw, filtered) = benchmark();
    let mut report = Vec::new();
    let mut stable = true;
    for (name, t) in [("raw", raw), ("filtered", filtered)] {
        let base = mean_divergence(t, DEFAULT_SMOOTHING);
        let half = mean_divergence(t, DEFAULT_SMOOTHING / 2.0);
        let rel = (half - base).abs() / base;
        stable &= rel < 0.01;
        report.push(format!("{name}: mean {base:.4} -> {half:.4} ({:.2}%)", 100.0 * rel));
    }
    assert!(stable, "{}", report.join("; "));
}

//! Subcommand bodies: read inputs, run a stage, write its artifacts.

use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;
use texharm_core::{io, DivergenceReport, FeatureTable, FilterBank, GrayImage};

use crate::classify::{classify_table, AccessLog, ClassifyOptions, ClassifyOutput};
use crate::config::PipelineConfig;
use crate::error::{data, usage};
use crate::extract::{
    discover, exclusions_csv, extract_cases, files_by_stem, load_bank, load_case, prepare, Exclusion, ExtractOptions,
    IMAGE_EXTENSIONS,
};
use crate::harmonize::{harmonize_tables, split_by_cohort, DivergenceOutput, HarmonizeOptions, HarmonizeOutput};

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    io::write_atomic(path, &bytes)?;
    Ok(())
}

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| data(format!("cannot create {}: {e}", dir.display())))
}

fn required<'a>(value: &'a Option<PathBuf>, flag: &str) -> anyhow::Result<&'a Path> {
    value.as_deref().ok_or_else(|| usage(format!("missing {flag}")))
}

fn bank_of(cfg: &PipelineConfig) -> anyhow::Result<Option<FilterBank>> {
    cfg.filter_bank.as_deref().map(load_bank).transpose()
}

/// Reads a feature table given on the command line; unreadable input is a usage error.
pub fn read_table(path: &Path) -> anyhow::Result<FeatureTable> {
    FeatureTable::read_csv(path).map_err(|e| usage(format!("cannot read feature table: {e}")))
}

/// Min-max stretch to 8 bits, for eyeballing filtered output.
fn preview(img: &GrayImage) -> anyhow::Result<GrayImage> {
    let (lo, hi) = img
        .data()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let scale = if hi > lo { 255.0 / (hi - lo) } else { 0.0 };
    Ok(img.map(|v| ((v - lo) * scale).round())?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilteredFile {
    pub source: PathBuf,
    pub sidecar: PathBuf,
    pub preview: PathBuf,
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailedFile {
    pub path: PathBuf,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterManifest {
    pub filter_bank: String,
    pub n_filters: usize,
    pub kernel_size: usize,
    pub filter_order: crate::config::FilterOrder,
    pub outputs: Vec<FilteredFile>,
    pub failures: Vec<FailedFile>,
}

/// Filters every image under `image_dir` into `<out>/filtered`. Files that
/// fail are listed in the manifest; the others are still written.
pub fn cmd_filter(cfg: &PipelineConfig) -> anyhow::Result<FilterManifest> {
    let spec = cfg
        .filter_bank
        .as_deref()
        .ok_or_else(|| usage("missing --filter-bank"))?;
    let bank = load_bank(spec)?;
    let image_dir = required(&cfg.image_dir, "--images")?;
    let out = cfg.output_dir()?.join("filtered");
    let inputs = files_by_stem(image_dir, &IMAGE_EXTENSIONS)?;
    create_dir(&out)?;
    let results: Vec<Result<FilteredFile, FailedFile>> = inputs
        .par_iter()
        .map(|(stem, path)| {
            let fail = |e: anyhow::Error| FailedFile {
                path: path.clone(),
                error: format!("{e:#}"),
            };
            let img = io::read_image(path).map_err(|e| fail(e.into()))?;
            let mask = texharm_core::RoiMask::full(img.width(), img.height()).map_err(|e| fail(e.into()))?;
            let (filtered, _) = prepare(&img, &mask, Some(&bank), cfg.filter_order).map_err(fail)?;
            let sidecar = out.join(format!("{stem}.txh"));
            let pgm = out.join(format!("{stem}.pgm"));
            io::write_sidecar(&filtered, &sidecar).map_err(|e| fail(e.into()))?;
            let shown = preview(&filtered).map_err(fail)?;
            io::write_pgm(&shown, &pgm).map_err(|e| fail(e.into()))?;
            Ok(FilteredFile {
                source: path.clone(),
                sidecar,
                preview: pgm,
                width: filtered.width(),
                height: filtered.height(),
            })
        })
        .collect();
    let (mut outputs, mut failures) = (Vec::new(), Vec::new());
    for r in results {
        match r {
            Ok(f) => outputs.push(f),
            Err(f) => {
                warn!("{}: {}", f.path.display(), f.error);
                failures.push(f);
            }
        }
    }
    let manifest = FilterManifest {
        filter_bank: spec.to_string(),
        n_filters: bank.num_filters(),
        kernel_size: bank.kernel_size(),
        filter_order: cfg.filter_order,
        outputs,
        failures,
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    if !manifest.failures.is_empty() {
        let list: Vec<String> = manifest.failures.iter().map(|f| f.path.display().to_string()).collect();
        return Err(data(format!("{} file(s) failed: {}", list.len(), list.join(", "))));
    }
    info!("filtered {} images into {}", manifest.outputs.len(), out.display());
    Ok(manifest)
}

#[derive(Debug, Clone)]
pub struct ExtractResult {
    pub table: FeatureTable,
    pub exclusions: Vec<Exclusion>,
    pub features_csv: PathBuf,
}

/// Extracts one table, filtered when `bank` is given, into `dir`.
pub fn extract_into(cfg: &PipelineConfig, bank: Option<&FilterBank>, dir: &Path) -> anyhow::Result<ExtractResult> {
    let (cases, mut exclusions) = discover(
        required(&cfg.image_dir, "--images")?,
        required(&cfg.mask_dir, "--masks")?,
        required(&cfg.metadata, "--metadata")?,
    )?;
    let opts = ExtractOptions {
        bank,
        bin_width: cfg.bin_width,
        filter_order: cfg.filter_order,
    };
    let (table, excluded) = extract_cases(&cases, load_case, &opts)?;
    exclusions.extend(excluded);
    exclusions.sort();
    for e in &exclusions {
        warn!("excluded {} {}: {}", e.case_id, e.phase, e.reason);
    }
    create_dir(dir)?;
    let features_csv = dir.join("features.csv");
    io::write_atomic(&features_csv, table.to_csv_string()?.as_bytes())?;
    io::write_atomic(dir.join("exclusions.csv"), &exclusions_csv(&exclusions)?)?;
    info!(
        "{} rows, {} exclusions -> {}",
        table.n_rows(),
        exclusions.len(),
        features_csv.display()
    );
    Ok(ExtractResult {
        table,
        exclusions,
        features_csv,
    })
}

pub fn cmd_extract(cfg: &PipelineConfig) -> anyhow::Result<ExtractResult> {
    let bank = bank_of(cfg)?;
    extract_into(cfg, bank.as_ref(), cfg.output_dir()?)
}

fn harmonize_options(cfg: &PipelineConfig) -> HarmonizeOptions {
    HarmonizeOptions {
        n_bins: cfg.n_bins,
        strict_jsd: cfg.strict_jsd,
        combat: cfg.combat,
    }
}

fn write_divergence(dir: &Path, suffix: &str, d: &DivergenceOutput) -> anyhow::Result<()> {
    write_json(&dir.join(format!("divergence{suffix}.json")), &d.report)?;
    io::write_atomic(dir.join(format!("histograms{suffix}.csv")), d.histograms_csv.as_bytes())?;
    Ok(())
}

/// Scores two cohorts and writes `divergence.json` + `histograms.csv`
/// (and `_combat` variants) into `dir`.
pub fn harmonize_into(
    a: &FeatureTable,
    b: &FeatureTable,
    cfg: &PipelineConfig,
    dir: &Path,
) -> anyhow::Result<HarmonizeOutput> {
    let out = harmonize_tables(a, b, &harmonize_options(cfg))?;
    create_dir(dir)?;
    write_divergence(dir, "", &out.before)?;
    if let Some(c) = &out.combat {
        write_divergence(dir, "_combat", c)?;
    }
    Ok(out)
}

/// One table holding two cohorts, or two tables.
pub fn cmd_harmonize(cfg: &PipelineConfig, table_a: &Path, table_b: Option<&Path>) -> anyhow::Result<HarmonizeOutput> {
    let a = read_table(table_a)?;
    let (a, b) = match table_b {
        Some(p) => (a, read_table(p)?),
        None => split_by_cohort(&a)?,
    };
    harmonize_into(&a, &b, cfg, cfg.output_dir()?)
}

pub fn classify_into(
    table: &FeatureTable,
    cfg: &PipelineConfig,
    dir: &Path,
    audit: Option<&mut AccessLog>,
) -> anyhow::Result<ClassifyOutput> {
    let out = classify_table(table, &ClassifyOptions::from_config(cfg), audit)?;
    create_dir(dir)?;
    write_json(&dir.join("model.json"), &out.model)?;
    write_json(&dir.join("metrics.json"), &out.metrics)?;
    write_json(&dir.join("selection.json"), &out.selection)?;
    io::write_atomic(dir.join("roc.csv"), out.roc_csv.as_bytes())?;
    let m = &out.metrics.metrics;
    info!(
        "test auc {:.4}, accuracy {:.4}, sensitivity {:.4}, specificity {:.4}",
        m.auc, m.accuracy, m.sensitivity, m.specificity
    );
    Ok(out)
}

pub fn cmd_classify(cfg: &PipelineConfig, table: &Path) -> anyhow::Result<ClassifyOutput> {
    classify_into(&read_table(table)?, cfg, cfg.output_dir()?, None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmSummary {
    pub rows: usize,
    pub exclusions: usize,
    pub mean_divergence: Option<f64>,
    pub mean_divergence_combat: Option<f64>,
    pub test_auc: f64,
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub f1: f64,
    pub n_selected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineSummary {
    pub seed: u64,
    pub filter_bank: String,
    pub config: PipelineConfig,
    pub raw: ArmSummary,
    pub filtered: ArmSummary,
}

fn run_arm(cfg: &PipelineConfig, bank: Option<&FilterBank>, dir: &Path) -> anyhow::Result<ArmSummary> {
    let ex = extract_into(cfg, bank, dir)?;
    let harmonized = match split_by_cohort(&ex.table) {
        Ok((a, b)) => Some(harmonize_into(&a, &b, cfg, dir)?),
        Err(e) => {
            warn!("skipping divergence scoring: {e}");
            None
        }
    };
    let mean = |d: &DivergenceReport| d.mean;
    let out = classify_into(&ex.table, cfg, dir, None)?;
    let m = &out.metrics.metrics;
    Ok(ArmSummary {
        rows: ex.table.n_rows(),
        exclusions: ex.exclusions.len(),
        mean_divergence: harmonized.as_ref().map(|h| mean(&h.before.report)),
        mean_divergence_combat: harmonized
            .as_ref()
            .and_then(|h| h.combat.as_ref())
            .map(|c| mean(&c.report)),
        test_auc: m.auc,
        accuracy: m.accuracy,
        sensitivity: m.sensitivity,
        specificity: m.specificity,
        f1: m.f1,
        n_selected: out.metrics.n_selected,
    })
}

/// Raw and filtered arms side by side under `<out>/raw` and `<out>/filtered`,
/// plus `summary.json`.
pub fn cmd_pipeline(cfg: &PipelineConfig) -> anyhow::Result<PipelineSummary> {
    let spec = cfg.filter_bank.clone().ok_or_else(|| usage("missing --filter-bank"))?;
    let bank = load_bank(&spec)?;
    let out = cfg.output_dir()?;
    info!("raw arm");
    let raw = run_arm(cfg, None, &out.join("raw"))?;
    info!("filtered arm");
    let filtered = run_arm(cfg, Some(&bank), &out.join("filtered"))?;
    let summary = PipelineSummary {
        seed: cfg.seed,
        filter_bank: spec,
        // paths are left out so reruns elsewhere compare equal
        config: PipelineConfig {
            image_dir: None,
            mask_dir: None,
            metadata: None,
            output_dir: None,
            ..cfg.clone()
        },
        raw,
        filtered,
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}

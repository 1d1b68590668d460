//! Case discovery, optional filtering and feature extraction.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use rayon::prelude::*;
use texharm_core::{io, FeatureRow, FeatureTable, FilterBank, GrayImage, RoiMask};
use texharm_imaging::{
    apply_filter_bank, generate_synthetic_bank, resize_mask_with_pad, resize_with_pad, FilterApplicationConfig,
    SyntheticKind, DEFAULT_TARGET,
};

use crate::config::FilterOrder;
use crate::error::{data, usage};

pub(crate) const IMAGE_EXTENSIONS: [&str; 3] = ["pgm", "png", "txh"];
const MASK_EXTENSIONS: [&str; 2] = ["pgm", "png"];

/// Resolves `--filter-bank`: a manifest path, or
/// `synthetic:<kind>[:<filters>[:<size>[:<seed>]]]` (defaults 128, 4, 0).
pub fn load_bank(spec: &str) -> anyhow::Result<FilterBank> {
    if let Some(rest) = spec.strip_prefix("synthetic:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let kind: SyntheticKind = parts[0].parse().map_err(usage)?;
        let num = |i: usize, default: u64| -> anyhow::Result<u64> {
            parts.get(i).map_or(Ok(default), |s| {
                s.parse()
                    .map_err(|_| usage(format!("bad number `{s}` in bank spec `{spec}`")))
            })
        };
        let bank = generate_synthetic_bank(kind, num(1, 128)? as usize, num(2, 4)? as usize, num(3, 0)?)
            .map_err(|e| usage(format!("bank spec `{spec}`: {e}")))?;
        return Ok(bank);
    }
    let path = Path::new(spec);
    if !path.is_file() {
        return Err(usage(format!("filter bank not found: {}", path.display())));
    }
    FilterBank::load(path).map_err(|e| usage(format!("cannot load filter bank {}: {e}", path.display())))
}

/// Applies the configured geometry and, when given, the filter bank.
pub fn prepare(
    image: &GrayImage,
    mask: &RoiMask,
    bank: Option<&FilterBank>,
    order: FilterOrder,
) -> anyhow::Result<(GrayImage, RoiMask)> {
    let (image, mask) = match order {
        FilterOrder::Original => (image.clone(), mask.clone()),
        FilterOrder::ResizeFirst => (
            resize_with_pad(image, DEFAULT_TARGET)?,
            resize_mask_with_pad(mask, DEFAULT_TARGET)?,
        ),
    };
    let image = match bank {
        Some(b) => apply_filter_bank(&image, b, &FilterApplicationConfig::default())?,
        None => image,
    };
    Ok((image, mask))
}

/// One image/mask pair with its metadata.
#[derive(Debug, Clone)]
pub struct CaseInput {
    pub case_id: String,
    pub cohort: String,
    pub class_label: Option<u8>,
    pub phase: Option<String>,
    pub image: PathBuf,
    pub mask: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Exclusion {
    pub case_id: String,
    pub phase: String,
    pub reason: String,
}

pub fn exclusions_csv(list: &[Exclusion]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["case_id", "phase", "reason"])?;
    for e in list {
        w.write_record([&e.case_id, &e.phase, &e.reason])?;
    }
    Ok(w.into_inner()?)
}

#[derive(Debug, Clone)]
struct MetaRow {
    cohort: String,
    class_label: Option<u8>,
}

fn read_metadata(path: &Path) -> anyhow::Result<BTreeMap<(String, String), MetaRow>> {
    let mut r =
        csv::Reader::from_path(path).map_err(|e| usage(format!("cannot read metadata {}: {e}", path.display())))?;
    let header = r.headers()?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| usage(format!("metadata {} has no `{name}` column", path.display())))
    };
    let (ci, co, cl, cp) = (col("case_id")?, col("cohort")?, col("class_label")?, col("phase")?);
    let mut out = BTreeMap::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.with_context(|| format!("metadata {}", path.display()))?;
        let get = |i: usize| rec.get(i).unwrap_or("").trim().to_string();
        let class_label = match get(cl).as_str() {
            "" => None,
            "0" => Some(0),
            "1" => Some(1),
            other => {
                return Err(usage(format!(
                    "metadata {} line {}: class_label `{other}` is not 0/1",
                    path.display(),
                    line + 2
                )))
            }
        };
        out.insert(
            (get(ci), get(cp)),
            MetaRow {
                cohort: get(co),
                class_label,
            },
        );
    }
    Ok(out)
}

pub(crate) fn files_by_stem(dir: &Path, extensions: &[&str]) -> anyhow::Result<BTreeMap<String, PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| usage(format!("cannot read directory {}: {e}", dir.display())))?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let path = entry?.path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if !ext.is_some_and(|e| extensions.contains(&e.as_str())) {
            continue;
        }
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            // prefer the earlier extension in the list when a stem appears twice
            let rank = |p: &PathBuf| {
                let e = p
                    .extension()
                    .and_then(|e| e.to_str())
                    .unwrap_or("")
                    .to_ascii_lowercase();
                extensions.iter().position(|x| *x == e)
            };
            let keep = out.get(stem).is_none_or(|old: &PathBuf| rank(&path) < rank(old));
            if keep {
                out.insert(stem.to_string(), path);
            }
        }
    }
    Ok(out)
}

/// Pairs `<case>_<phase>` images with same-stem masks and metadata rows.
/// Unpairable images become exclusions.
pub fn discover(
    image_dir: &Path,
    mask_dir: &Path,
    metadata: &Path,
) -> anyhow::Result<(Vec<CaseInput>, Vec<Exclusion>)> {
    let meta = read_metadata(metadata)?;
    let images = files_by_stem(image_dir, &IMAGE_EXTENSIONS)?;
    let masks = files_by_stem(mask_dir, &MASK_EXTENSIONS)?;
    let mut cases = Vec::new();
    let mut excluded = Vec::new();
    for (stem, image) in images {
        let (case_id, phase) = match stem.rsplit_once('_') {
            Some((c, p)) if !c.is_empty() && !p.is_empty() => (c.to_string(), p.to_string()),
            _ => (stem.clone(), String::new()),
        };
        let exclude = |reason: &str| Exclusion {
            case_id: case_id.clone(),
            phase: phase.clone(),
            reason: reason.to_string(),
        };
        let Some(mask) = masks.get(&stem) else {
            excluded.push(exclude("no mask with the same stem"));
            continue;
        };
        let Some(m) = meta.get(&(case_id.clone(), phase.clone())) else {
            excluded.push(exclude("no metadata row"));
            continue;
        };
        cases.push(CaseInput {
            case_id: case_id.clone(),
            cohort: m.cohort.clone(),
            class_label: m.class_label,
            phase: (!phase.is_empty()).then(|| phase.clone()),
            image,
            mask: mask.clone(),
        });
    }
    Ok((cases, excluded))
}

#[derive(Debug, Clone, Copy)]
pub struct ExtractOptions<'a> {
    pub bank: Option<&'a FilterBank>,
    pub bin_width: f64,
    pub filter_order: FilterOrder,
}

fn extract_one(
    meta: FeatureRow,
    image: &GrayImage,
    mask: &RoiMask,
    opts: &ExtractOptions,
) -> Result<FeatureRow, Exclusion> {
    let exclusion = |reason: String| Exclusion {
        case_id: meta.case_id.clone(),
        phase: meta.phase.clone().unwrap_or_default(),
        reason,
    };
    let (img, roi) = prepare(image, mask, opts.bank, opts.filter_order).map_err(|e| exclusion(e.to_string()))?;
    let fv = texharm_radiomics::extract_all(&img, &roi, opts.bin_width).map_err(|e| exclusion(e.to_string()))?;
    Ok(FeatureRow {
        values: fv.into_values(),
        ..meta
    })
}

/// Extracts every case (in parallel when a pool is installed); the table
/// comes back sorted by case id and phase.
pub fn extract_cases<C: Sync>(
    cases: &[C],
    load: impl Fn(&C) -> Result<(FeatureRow, GrayImage, RoiMask), Exclusion> + Sync,
    opts: &ExtractOptions,
) -> anyhow::Result<(FeatureTable, Vec<Exclusion>)> {
    let results: Vec<Result<FeatureRow, Exclusion>> = cases
        .par_iter()
        .map(|c| {
            let (meta, image, mask) = load(c)?;
            extract_one(meta, &image, &mask, opts)
        })
        .collect();
    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => excluded.push(e),
        }
    }
    if rows.is_empty() {
        return Err(data(format!("no usable cases ({} excluded)", excluded.len())));
    }
    excluded.sort();
    let table = texharm_radiomics::feature_table(rows)?.sorted();
    Ok((table, excluded))
}

/// Loader for on-disk cases.
pub fn load_case(c: &CaseInput) -> Result<(FeatureRow, GrayImage, RoiMask), Exclusion> {
    let fail = |reason: String| Exclusion {
        case_id: c.case_id.clone(),
        phase: c.phase.clone().unwrap_or_default(),
        reason,
    };
    let image = io::read_image(&c.image).map_err(|e| fail(e.to_string()))?;
    let mask = io::read_mask(&c.mask).map_err(|e| fail(e.to_string()))?;
    let meta = FeatureRow {
        case_id: c.case_id.clone(),
        cohort: c.cohort.clone(),
        class_label: c.class_label,
        phase: c.phase.clone(),
        values: Vec::new(),
    };
    Ok((meta, image, mask))
}

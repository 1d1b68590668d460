mod common;

use std::fs;
use std::path::Path;

use common::*;
use texharm_core::{io, DivergenceReport, FeatureRow, FeatureTable, GrayImage, RoiMask};

fn first_n_images(layout_dir: &Path, n: usize, dest: &Path) {
    fs::create_dir_all(dest).unwrap();
    let mut files: Vec<_> = fs::read_dir(layout_dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    for f in files.into_iter().take(n) {
        fs::copy(&f, dest.join(f.file_name().unwrap())).unwrap();
    }
}

#[test]
fn synth_writes_documented_file_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("syn");
    assert_ok(&texharm(&["--out", s(&out), "synth", "--size", "32"]));
    let count = |d: &str| fs::read_dir(out.join(d)).unwrap().count();
    assert_eq!(count("images"), 400);
    assert_eq!(count("masks"), 400);
    let meta = fs::read_to_string(out.join("metadata.csv")).unwrap();
    assert_eq!(meta.lines().count(), 401);
    assert_eq!(meta.lines().filter(|l| l.contains(",scannerA,0,")).count(), 100);
    assert_eq!(meta.lines().filter(|l| l.contains(",scannerB,1,")).count(), 100);
}

#[test]
fn synth_styles_share_masks_but_not_pixels() {
    let dir = tempfile::tempdir().unwrap();
    let l = small_cohort(dir.path(), 4, 48, true);
    for class in 0..2 {
        for i in 0..4 {
            let stem = |style: &str| format!("{style}-c{class}-{i:04}_ED.pgm");
            let ma = io::read_mask(l.mask_dir.join(stem("scannerA"))).unwrap();
            let mb = io::read_mask(l.mask_dir.join(stem("scannerB"))).unwrap();
            assert_eq!(ma, mb);
            let ia = io::read_image(l.image_dir.join(stem("scannerA"))).unwrap();
            let ib = io::read_image(l.image_dir.join(stem("scannerB"))).unwrap();
            assert_ne!(ia, ib);
        }
    }
}

#[test]
fn synth_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        assert_ok(&texharm(&[
            "--out",
            s(&out),
            "--seed",
            seed,
            "synth",
            "--cases",
            "2",
            "--size",
            "32",
        ]));
        fs::read(out.join("images/scannerB-c1-0001_ED.pgm")).unwrap()
    };
    assert_eq!(run("a", "5"), run("b", "5"));
    assert_ne!(run("a", "5"), run("c", "6"));
}

#[test]
fn filter_identity_bank_reproduces_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let l = small_cohort(&dir.path().join("syn"), 2, 40, true);
    let images = dir.path().join("three");
    first_n_images(&l.image_dir, 3, &images);
    let out = dir.path().join("out");
    let args = [
        "--images",
        s(&images),
        "--filter-bank",
        "synthetic:identity:1:4",
        "--out",
        s(&out),
        "filter",
    ];
    assert_ok(&texharm(&args));
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("filtered/manifest.json")).unwrap()).unwrap();
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 3);
    assert!(manifest["failures"].as_array().unwrap().is_empty());
    for entry in outputs {
        let src = io::read_image(entry["source"].as_str().unwrap()).unwrap();
        let got = io::read_sidecar(entry["sidecar"].as_str().unwrap()).unwrap();
        assert!(Path::new(entry["preview"].as_str().unwrap()).is_file());
        assert_eq!((got.width(), got.height()), (src.width(), src.height()));
        // border pixels depend on padding and are not compared
        for r in 1..src.height() - 1 {
            for c in 1..src.width() - 1 {
                assert_eq!(got.get(r, c), src.get(r, c), "pixel ({r},{c})");
            }
        }
    }

    let first = fs::read(out.join("filtered/manifest.json")).unwrap();
    let sidecars: Vec<Vec<u8>> = outputs
        .iter()
        .map(|e| fs::read(e["sidecar"].as_str().unwrap()).unwrap())
        .collect();
    assert_ok(&texharm(&args));
    assert_eq!(fs::read(out.join("filtered/manifest.json")).unwrap(), first);
    for (e, before) in outputs.iter().zip(sidecars) {
        assert_eq!(fs::read(e["sidecar"].as_str().unwrap()).unwrap(), before);
    }
}

#[test]
fn missing_bank_exits_2_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let bank = dir.path().join("nowhere/bank.json");
    let o = texharm(&[
        "--images",
        s(dir.path()),
        "--filter-bank",
        s(&bank),
        "--out",
        s(dir.path()),
        "filter",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(s(&bank)), "{}", stderr(&o));
}

#[test]
fn filter_keeps_partial_progress() {
    let dir = tempfile::tempdir().unwrap();
    let l = small_cohort(&dir.path().join("syn"), 1, 32, true);
    let images = dir.path().join("imgs");
    first_n_images(&l.image_dir, 2, &images);
    let broken = images.join("broken_ED.pgm");
    fs::write(&broken, b"P5 garbage").unwrap();
    let out = dir.path().join("out");
    let o = texharm(&[
        "--images",
        s(&images),
        "--filter-bank",
        "synthetic:gaussian_random:8",
        "--out",
        s(&out),
        "filter",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("broken_ED.pgm"));
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("filtered/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
    assert_eq!(manifest["failures"][0]["path"].as_str().unwrap(), s(&broken));
}

fn ten_pairs(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf, std::path::PathBuf) {
    let l = small_cohort(&dir.join("syn"), 5, 48, false);
    let (images, masks) = (dir.join("images"), dir.join("masks"));
    // scannerA only: 2 classes x 5 cases
    first_n_images(&l.image_dir, 10, &images);
    first_n_images(&l.mask_dir, 10, &masks);
    (images, masks, l.metadata)
}

#[test]
fn extract_ten_pairs_gives_97_columns() {
    let dir = tempfile::tempdir().unwrap();
    let (images, masks, meta) = ten_pairs(dir.path());
    let out = dir.path().join("out");
    assert_ok(&texharm(&[
        "--images",
        s(&images),
        "--masks",
        s(&masks),
        "--metadata",
        s(&meta),
        "--out",
        s(&out),
        "extract",
    ]));
    let t = FeatureTable::read_csv(out.join("features.csv")).unwrap();
    assert_eq!(t.n_rows(), 10);
    let cols = header(&out.join("features.csv"));
    assert_eq!(cols.len(), 97);
    assert_eq!(&cols[..4], ["case_id", "cohort", "class_label", "phase"]);
    assert_eq!(&cols[4..], texharm_radiomics::feature_names());
    assert_eq!(t.labels().unwrap().iter().filter(|&&l| l == 1).count(), 5);
    assert_eq!(
        fs::read_to_string(out.join("exclusions.csv")).unwrap().lines().count(),
        1
    );
}

#[test]
fn degenerate_mask_is_excluded() {
    let dir = tempfile::tempdir().unwrap();
    let (images, masks, meta) = ten_pairs(dir.path());
    let victim = masks.join("scannerA-c1-0002_ED.pgm");
    let m = io::read_mask(&victim).unwrap();
    io::write_mask(
        &RoiMask::new(m.width(), m.height(), vec![false; m.width() * m.height()]).unwrap(),
        &victim,
    )
    .unwrap();
    let out = dir.path().join("out");
    assert_ok(&texharm(&[
        "--images",
        s(&images),
        "--masks",
        s(&masks),
        "--metadata",
        s(&meta),
        "--out",
        s(&out),
        "extract",
    ]));
    assert_eq!(FeatureTable::read_csv(out.join("features.csv")).unwrap().n_rows(), 9);
    let mut r = csv::Reader::from_path(out.join("exclusions.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "scannerA-c1-0002");
    assert_eq!(&rows[0][1], "ED");
}

#[test]
fn all_degenerate_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let (images, masks, meta) = ten_pairs(dir.path());
    for e in fs::read_dir(&masks).unwrap() {
        let p = e.unwrap().path();
        let m = io::read_mask(&p).unwrap();
        io::write_mask(
            &RoiMask::new(m.width(), m.height(), vec![false; m.width() * m.height()]).unwrap(),
            &p,
        )
        .unwrap();
    }
    let out = dir.path().join("out");
    let o = texharm(&[
        "--images",
        s(&images),
        "--masks",
        s(&masks),
        "--metadata",
        s(&meta),
        "--out",
        s(&out),
        "extract",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn filtering_changes_feature_values() {
    let dir = tempfile::tempdir().unwrap();
    let (images, masks, meta) = ten_pairs(dir.path());
    let run = |name: &str, bank: Option<&str>| {
        let out = dir.path().join(name);
        let mut args = vec![
            "--images",
            s(&images),
            "--masks",
            s(&masks),
            "--metadata",
            s(&meta),
            "--out",
            s(&out),
        ];
        if let Some(b) = bank {
            args.extend(["--filter-bank", b]);
        }
        args.push("extract");
        assert_ok(&texharm(&args));
        FeatureTable::read_csv(out.join("features.csv")).unwrap()
    };
    let raw = run("raw", None);
    let filtered = run("filtered", Some("synthetic:difference_of_gaussians:16"));
    let j = raw.feature_index("glcm_Contrast").unwrap();
    for (a, b) in raw.rows().iter().zip(filtered.rows()) {
        assert_eq!(a.case_id, b.case_id);
        assert_ne!(a.values[j], b.values[j]);
    }
}

fn table(cohort: &str, values: impl Fn(usize, usize) -> f64, n: usize) -> FeatureTable {
    let names = texharm_radiomics::feature_names().to_vec();
    let rows = (0..n)
        .map(|i| FeatureRow {
            case_id: format!("{cohort}-{i:04}"),
            cohort: cohort.into(),
            class_label: Some((i % 2) as u8),
            phase: Some("ED".into()),
            values: (0..names.len()).map(|j| values(i, j)).collect(),
        })
        .collect();
    FeatureTable::new(names, rows).unwrap()
}

fn harmonize(dir: &Path, a: &FeatureTable, b: &FeatureTable, extra: &[&str]) -> DivergenceReport {
    let (pa, pb, out) = (dir.join("a.csv"), dir.join("b.csv"), dir.join("report"));
    fs::create_dir_all(dir).unwrap();
    a.write_csv(&pa).unwrap();
    b.write_csv(&pb).unwrap();
    let mut args = vec!["--out", s(&out)];
    args.extend(extra);
    args.extend(["harmonize", s(&pa), s(&pb)]);
    assert_ok(&texharm(&args));
    assert!(out.join("histograms.csv").is_file());
    serde_json::from_slice(&fs::read(out.join("divergence.json")).unwrap()).unwrap()
}

fn gaussian(seed: u64) -> impl Fn(usize, usize) -> f64 {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    move |i, j| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ ((i as u64) << 20) ^ j as u64);
        StandardNormal.sample(&mut rng)
    }
}

#[test]
fn harmonize_identical_cohorts_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let a = table("A", gaussian(1), 60);
    let r = harmonize(dir.path(), &a, &a, &[]);
    assert_eq!(r.per_feature.len(), 93);
    assert!(r.per_feature.values().all(|&v| v == 0.0));
    assert_eq!(r.mean, 0.0);
}

#[test]
fn harmonize_shifted_feature_scores_higher_and_summaries_match() {
    let dir = tempfile::tempdir().unwrap();
    let a = table("A", gaussian(2), 500);
    let same = table("B", gaussian(3), 500);
    let g = gaussian(3);
    let shifted = table("B", move |i, j| g(i, j) + if j == 0 { 3.0 } else { 0.0 }, 500);
    let r_same = harmonize(&dir.path().join("same"), &a, &same, &[]);
    let r_shift = harmonize(&dir.path().join("shift"), &a, &shifted, &[]);
    assert!(r_same.mean < r_shift.mean, "{} vs {}", r_same.mean, r_shift.mean);

    for r in [&r_same, &r_shift] {
        let v: Vec<f64> = r.per_feature.values().copied().collect();
        assert_eq!(texharm_core::stats::mean(&v), r.mean);
        let mut sorted = v.clone();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(sorted[46], r.median);
    }
}

#[test]
fn harmonize_single_table_and_combat() {
    let dir = tempfile::tempdir().unwrap();
    let g = gaussian(4);
    let a = table("A", gaussian(5), 80);
    let b = table("B", move |i, j| 2.0 * g(i, j) + 5.0, 80);
    let both = dir.path().join("both.csv");
    a.concat(&b).unwrap().write_csv(&both).unwrap();
    let out = dir.path().join("out");
    assert_ok(&texharm(&[
        "--out",
        s(&out),
        "--combat",
        "--strict-jsd",
        "harmonize",
        s(&both),
    ]));
    let read = |f: &str| -> DivergenceReport { serde_json::from_slice(&fs::read(out.join(f)).unwrap()).unwrap() };
    let (before, after) = (read("divergence.json"), read("divergence_combat.json"));
    assert_eq!(before.metric, "strict_jsd");
    assert!(after.mean < before.mean);

    let o = texharm(&["--out", s(&out), "harmonize", s(&dir.path().join("absent.csv"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn harmonize_rejects_schema_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let a = table("A", gaussian(1), 20);
    let b = a.select_features(&a.feature_names()[..10]).unwrap();
    let (pa, pb) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    a.write_csv(&pa).unwrap();
    b.write_csv(&pb).unwrap();
    let o = texharm(&["--out", s(dir.path()), "harmonize", s(&pa), s(&pb)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("different feature columns"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let o = texharm(&[
        "--config",
        s(&cfg),
        "--out",
        s(dir.path()),
        "synth",
        "--cases",
        "1",
        "--size",
        "16",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no_such_key"));

    fs::write(&cfg, "seed = 9\n").unwrap();
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec!["--config", s(&cfg), "--out", s(&out)];
        args.extend(extra);
        args.extend(["synth", "--cases", "1", "--size", "32"]);
        assert_ok(&texharm(&args));
        fs::read(out.join("images/scannerA-c0-0000_ED.pgm")).unwrap()
    };
    let from_file = run("f", &[]);
    assert_eq!(from_file, run("s9", &["--seed", "9"]));
    assert_ne!(from_file, run("s1", &["--seed", "1"]));

    let o = texharm(&["--selection-policy", "rank-2", "synth"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = std::process::Command::new(BIN)
        .args(["synth", "--cases", "1", "--size", "16"])
        .env("TEXHARM_OUT", dir.path())
        .output()
        .unwrap();
    assert_ok(&o);
    assert!(dir.path().join("metadata.csv").is_file());
    let none = texharm(&["synth", "--cases", "1", "--size", "16"]);
    assert_eq!(none.status.code(), Some(2));
}

#[test]
fn preview_is_stretched_to_full_range() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("imgs");
    fs::create_dir_all(&images).unwrap();
    let img = GrayImage::from_fn(20, 20, |r, c| (100 + r + c) as f64).unwrap();
    io::write_pgm(&img, images.join("x_ED.pgm")).unwrap();
    let out = dir.path().join("out");
    assert_ok(&texharm(&[
        "--images",
        s(&images),
        "--filter-bank",
        "synthetic:gaussian_random:4",
        "--out",
        s(&out),
        "filter",
    ]));
    let p = io::read_image(out.join("filtered/x_ED.pgm")).unwrap();
    let (lo, hi) = p
        .data()
        .iter()
        .fold((255.0f64, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert_eq!((lo, hi), (0.0, 255.0));
}

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use texharm_cli::config::FilterOrder;
use texharm_cli::extract::{extract_cases, load_bank, ExtractOptions};
use texharm_cli::synth::{generate, write_cohort, SynthCase, SynthConfig, SynthLayout};
use texharm_core::{FeatureRow, FeatureTable};

pub const BIN: &str = env!("CARGO_BIN_EXE_texharm");

/// Small Boruta and grid so end-to-end runs stay quick.
pub const FAST_CONFIG: &str = "boruta_trees = 100\nboruta_max_iter = 20\n[grid]\nn_trees = [20, 50]\nmax_depth = [2, 3]\nlearning_rate = [0.1]\nmin_child_rows = [1]\n";

pub fn texharm(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("TEXHARM_OUT")
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn assert_ok(o: &Output) {
    assert!(o.status.success(), "exit {:?}\n{}", o.status.code(), stderr(o));
}

pub fn small_cohort(dir: &Path, cases_per_class: usize, size: usize, paired: bool) -> SynthLayout {
    let cfg = SynthConfig {
        cases_per_class,
        size,
        paired,
        ..Default::default()
    };
    write_cohort(&generate(&cfg), dir).unwrap()
}

pub fn write_fast_config(dir: &Path) -> PathBuf {
    let p = dir.join("fast.toml");
    std::fs::write(&p, FAST_CONFIG).unwrap();
    p
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Column names of a CSV header.
pub fn header(path: &Path) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.headers().unwrap().iter().map(String::from).collect()
}

/// Extracts in-memory synthetic cases, optionally through a bank spec.
pub fn extract_synth(cases: &[SynthCase], bank: Option<&str>) -> FeatureTable {
    let bank = bank.map(|b| load_bank(b).unwrap());
    let opts = ExtractOptions {
        bank: bank.as_ref(),
        bin_width: 5.0,
        filter_order: FilterOrder::Original,
    };
    let load = |c: &SynthCase| {
        let meta = FeatureRow {
            case_id: c.case_id.clone(),
            cohort: c.cohort.clone(),
            class_label: Some(c.class_label),
            phase: Some(c.phase.clone()),
            values: Vec::new(),
        };
        Ok((meta, c.image.clone(), c.mask.clone()))
    };
    let (table, excluded) = extract_cases(cases, load, &opts).unwrap();
    assert!(excluded.is_empty());
    table
}

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use texharm_core::PhaseMerge;
use texharm_mlpipe::{default_grid, GbtParams, SelectionPolicy};

use crate::error::usage;

/// Where the Youden cutoff is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffProtocol {
    /// On the test-set ROC curve.
    #[default]
    Test,
    /// On out-of-fold predictions over the training rows.
    Validation,
}

/// Geometry applied before filtering and extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterOrder {
    /// Filter and extract at the native resolution.
    #[default]
    Original,
    /// Resize-with-pad images and masks to 448x448 first.
    ResizeFirst,
}

/// Rows used to fit the Yeo-Johnson/z-score parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizerFit {
    #[default]
    Train,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMergeMode {
    #[default]
    Concat,
    Mean,
}

impl From<PhaseMergeMode> for PhaseMerge {
    fn from(m: PhaseMergeMode) -> Self {
        match m {
            PhaseMergeMode::Concat => PhaseMerge::Concat,
            PhaseMergeMode::Mean => PhaseMerge::Mean,
        }
    }
}

macro_rules! parse_via_serde {
    ($($t:ty),*) => {$(
        impl std::str::FromStr for $t {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                <$t>::deserialize(serde::de::value::StrDeserializer::<serde::de::value::Error>::new(s))
                    .map_err(|e| e.to_string())
            }
        }
    )*};
}

parse_via_serde!(CutoffProtocol, FilterOrder, NormalizerFit, PhaseMergeMode);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n_trees: Vec<usize>,
    pub max_depth: Vec<usize>,
    pub learning_rate: Vec<f64>,
    pub min_child_rows: Vec<usize>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n_trees: vec![50, 100, 200],
            max_depth: vec![2, 3, 4],
            learning_rate: vec![0.05, 0.1, 0.3],
            min_child_rows: vec![1, 5],
        }
    }
}

impl GridConfig {
    pub fn points(&self) -> Vec<GbtParams> {
        if *self == Self::default() {
            return default_grid();
        }
        let mut grid = Vec::new();
        for &n_trees in &self.n_trees {
            for &max_depth in &self.max_depth {
                for &learning_rate in &self.learning_rate {
                    for &min_child_rows in &self.min_child_rows {
                        grid.push(GbtParams {
                            n_trees,
                            max_depth,
                            learning_rate,
                            min_child_rows,
                        });
                    }
                }
            }
        }
        grid
    }
}

/// Every protocol parameter of a run. Loaded from TOML; CLI flags override.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub image_dir: Option<PathBuf>,
    pub mask_dir: Option<PathBuf>,
    pub metadata: Option<PathBuf>,
    /// Bank manifest path, or `synthetic:<kind>[:<filters>[:<size>[:<seed>]]]`.
    pub filter_bank: Option<String>,
    pub output_dir: Option<PathBuf>,
    pub bin_width: f64,
    pub n_bins: usize,
    pub seed: u64,
    pub train_ratio: f64,
    pub jobs: usize,
    pub selection_policy: SelectionPolicy,
    pub cutoff_protocol: CutoffProtocol,
    pub filter_order: FilterOrder,
    pub normalizer_fit: NormalizerFit,
    pub phase_merge: PhaseMergeMode,
    pub combat: bool,
    pub strict_jsd: bool,
    pub cv_folds: usize,
    pub boruta_max_iter: usize,
    pub boruta_trees: usize,
    pub boruta_alpha: f64,
    pub grid: GridConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            image_dir: None,
            mask_dir: None,
            metadata: None,
            filter_bank: None,
            output_dir: None,
            bin_width: texharm_radiomics::DEFAULT_BIN_WIDTH,
            n_bins: texharm_harmonize::DEFAULT_BINS,
            seed: 0,
            train_ratio: texharm_mlpipe::DEFAULT_TRAIN_RATIO,
            jobs: 1,
            selection_policy: SelectionPolicy::Rank1,
            cutoff_protocol: CutoffProtocol::Test,
            filter_order: FilterOrder::Original,
            normalizer_fit: NormalizerFit::Train,
            phase_merge: PhaseMergeMode::Concat,
            combat: false,
            strict_jsd: false,
            cv_folds: texharm_mlpipe::DEFAULT_FOLDS,
            boruta_max_iter: 100,
            boruta_trees: 500,
            boruta_alpha: 0.05,
            grid: GridConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| usage(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text).with_context(|| format!("config {}", path.display()))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if !(self.bin_width > 0.0 && self.bin_width.is_finite()) {
            return Err(usage(format!("bin_width must be positive, got {}", self.bin_width)));
        }
        if self.n_bins == 0 {
            return Err(usage("n_bins must be at least 1"));
        }
        if !(self.train_ratio > 0.0 && self.train_ratio < 1.0) {
            return Err(usage(format!(
                "train_ratio must be in (0, 1), got {}",
                self.train_ratio
            )));
        }
        if self.cv_folds < 2 {
            return Err(usage("cv_folds must be at least 2"));
        }
        if self.boruta_trees == 0 || self.boruta_max_iter == 0 {
            return Err(usage("boruta_trees and boruta_max_iter must be positive"));
        }
        if !(self.boruta_alpha > 0.0 && self.boruta_alpha < 1.0) {
            return Err(usage("boruta_alpha must be in (0, 1)"));
        }
        if self.grid.points().is_empty() {
            return Err(usage("classifier grid is empty"));
        }
        Ok(())
    }

    pub fn output_dir(&self) -> anyhow::Result<&Path> {
        self.output_dir
            .as_deref()
            .ok_or_else(|| usage("no output directory (use --out, output_dir or TEXHARM_OUT)"))
    }
}

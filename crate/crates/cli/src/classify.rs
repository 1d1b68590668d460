//! Split, normalize, select, tune, train and evaluate.

use std::collections::BTreeSet;

use log::{info, warn};
use serde::Serialize;
use texharm_core::FeatureTable;
use texharm_evalstats::{classification_metrics, roc_curve, youden_cutoff, MetricsReport};
use texharm_mlpipe::{
    boruta, cross_val_predict, fit_normalizer, gbt_predict, gbt_train, grid_search, select_features, split_indices,
    BorutaParams, BorutaResult, Decision, GbtModel, GbtParams, PowerTransform, RfParams, SelectionPolicy,
};

use crate::config::{CutoffProtocol, NormalizerFit, PhaseMergeMode, PipelineConfig};
use crate::error::usage;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyOptions {
    pub seed: u64,
    pub train_ratio: f64,
    pub selection_policy: SelectionPolicy,
    pub cutoff_protocol: CutoffProtocol,
    pub normalizer_fit: NormalizerFit,
    pub phase_merge: PhaseMergeMode,
    pub grid: Vec<GbtParams>,
    pub cv_folds: usize,
    pub boruta: BorutaParams,
}

impl ClassifyOptions {
    pub fn from_config(cfg: &PipelineConfig) -> Self {
        Self {
            seed: cfg.seed,
            train_ratio: cfg.train_ratio,
            selection_policy: cfg.selection_policy,
            cutoff_protocol: cfg.cutoff_protocol,
            normalizer_fit: cfg.normalizer_fit,
            phase_merge: cfg.phase_merge,
            grid: cfg.grid.points(),
            cv_folds: cfg.cv_folds,
            boruta: BorutaParams {
                max_iter: cfg.boruta_max_iter,
                alpha: cfg.boruta_alpha,
                forest: RfParams {
                    n_trees: cfg.boruta_trees,
                    ..Default::default()
                },
            },
        }
    }
}

/// Seeds used by each randomized stage, all derived from the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Seeds {
    pub master: u64,
    pub split: u64,
    pub boruta: u64,
    pub cross_validation: u64,
}

impl Seeds {
    pub fn derive(master: u64) -> Self {
        Self {
            master,
            split: master,
            boruta: master.wrapping_add(1),
            cross_validation: master.wrapping_add(2),
        }
    }
}

/// Stages whose row accesses are recorded by [`AccessLog`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    NormalizerFit,
    FeatureSelection,
    ModelSelection,
    Training,
    Evaluation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Access {
    pub stage: Stage,
    pub train_rows: usize,
    pub test_rows: usize,
}

/// Instrumentation hook: counts, per stage, how many rows handed to a
/// fitting routine belong to the train and to the test split.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AccessLog {
    pub accesses: Vec<Access>,
}

impl AccessLog {
    fn record(&mut self, stage: Stage, rows: &FeatureTable, test_ids: &BTreeSet<&str>) {
        let test_rows = rows
            .rows()
            .iter()
            .filter(|r| test_ids.contains(r.case_id.as_str()))
            .count();
        self.accesses.push(Access {
            stage,
            train_rows: rows.n_rows() - test_rows,
            test_rows,
        });
    }

    pub fn test_rows_in(&self, stage: Stage) -> usize {
        self.accesses
            .iter()
            .filter(|a| a.stage == stage)
            .map(|a| a.test_rows)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureSelection {
    pub feature: String,
    pub rank: usize,
    pub decision: Decision,
    pub hits: usize,
    pub trials: usize,
    pub mean_importance: f64,
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionReport {
    pub policy: SelectionPolicy,
    pub fell_back: bool,
    pub iterations: usize,
    pub features: Vec<FeatureSelection>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cutoff {
    pub protocol: CutoffProtocol,
    pub threshold: f64,
    pub youden_j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelArtifact {
    pub seeds: Seeds,
    pub normalizer: PowerTransform,
    pub selected_features: Vec<String>,
    pub params: GbtParams,
    pub cv_auc: f64,
    pub cutoff: Cutoff,
    pub model: GbtModel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsOutput {
    pub seeds: Seeds,
    pub n_train: usize,
    pub n_test: usize,
    pub n_selected: usize,
    pub cutoff_protocol: CutoffProtocol,
    /// True when the cutoff was tuned on the rows it is evaluated on.
    pub optimistic_cutoff: bool,
    pub normalizer_fit: NormalizerFit,
    pub cv_auc: f64,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyOutput {
    pub model: ModelArtifact,
    pub metrics: MetricsOutput,
    pub selection: SelectionReport,
    pub roc_csv: String,
}

fn labels_of(t: &FeatureTable) -> anyhow::Result<Vec<u8>> {
    t.labels()
        .map_err(|e| usage(format!("class_label column missing or empty: {e}")))
}

/// Merges ED/ES rows into one row per case when the table has several phases per case.
fn one_row_per_case(table: &FeatureTable, mode: PhaseMergeMode) -> anyhow::Result<FeatureTable> {
    let ids: BTreeSet<&str> = table.rows().iter().map(|r| r.case_id.as_str()).collect();
    if ids.len() == table.n_rows() {
        return Ok(table.clone());
    }
    Ok(table.merge_phases(mode.into())?)
}

pub fn classify_table(
    table: &FeatureTable,
    opts: &ClassifyOptions,
    mut audit: Option<&mut AccessLog>,
) -> anyhow::Result<ClassifyOutput> {
    let table = one_row_per_case(table, opts.phase_merge)?;
    let labels = labels_of(&table)?;
    let seeds = Seeds::derive(opts.seed);
    let (train_idx, test_idx) = split_indices(&labels, opts.train_ratio, seeds.split)?;
    let train = table.subset_rows(&train_idx);
    let test = table.subset_rows(&test_idx);
    let test_ids: BTreeSet<&str> = test.rows().iter().map(|r| r.case_id.as_str()).collect();
    let mut log = |stage: Stage, rows: &FeatureTable| {
        if let Some(a) = audit.as_deref_mut() {
            a.record(stage, rows, &test_ids);
        }
    };
    info!("split: {} train / {} test rows", train.n_rows(), test.n_rows());

    let fit_rows = match opts.normalizer_fit {
        NormalizerFit::Train => &train,
        NormalizerFit::All => &table,
    };
    log(Stage::NormalizerFit, fit_rows);
    let normalizer = fit_normalizer(fit_rows)?;
    for name in normalizer.constant_features() {
        warn!("feature {name} is constant on the fitting rows; emitted as zeros");
    }
    let train = normalizer.apply(&train)?;
    let test = normalizer.apply(&test)?;
    let y_train = labels_of(&train)?;
    let y_test = labels_of(&test)?;

    log(Stage::FeatureSelection, &train);
    let ranking: BorutaResult = boruta(&train.matrix(), &y_train, &opts.boruta, seeds.boruta)?;
    let (selected, fell_back) = select_features(&ranking, opts.selection_policy);
    if fell_back {
        warn!("no feature confirmed; falling back to features ranked below 10");
    }
    let names: Vec<String> = selected.iter().map(|&j| train.feature_names()[j].clone()).collect();
    info!("selected {} features", names.len());
    let train = train.select_features(&names)?;
    let test = test.select_features(&names)?;
    let (x_train, x_test) = (train.matrix(), test.matrix());

    log(Stage::ModelSelection, &train);
    let search = grid_search(&x_train, &y_train, &opts.grid, opts.cv_folds, seeds.cross_validation)?;
    info!("best parameters {:?} (cv auc {:.4})", search.best, search.best_auc);
    log(Stage::Training, &train);
    let targets: Vec<f64> = y_train.iter().map(|&l| f64::from(l)).collect();
    let model = gbt_train(&x_train, &targets, &search.best)?;

    log(Stage::Evaluation, &test);
    let scores = gbt_predict(&model, &x_test)?;
    let test_curve = roc_curve(&scores, &y_test)?;
    let youden = match opts.cutoff_protocol {
        CutoffProtocol::Test => youden_cutoff(&test_curve),
        CutoffProtocol::Validation => {
            let oof = cross_val_predict(&x_train, &y_train, &search.best, opts.cv_folds, seeds.cross_validation)?;
            youden_cutoff(&roc_curve(&oof, &y_train)?)
        }
    };
    let metrics = classification_metrics(&scores, &y_test, youden.threshold)?;

    let selection = SelectionReport {
        policy: opts.selection_policy,
        fell_back,
        iterations: ranking.iterations,
        features: table
            .feature_names()
            .iter()
            .enumerate()
            .map(|(j, name)| FeatureSelection {
                feature: name.clone(),
                rank: ranking.ranks[j],
                decision: ranking.decisions[j],
                hits: ranking.hits[j],
                trials: ranking.trials[j],
                mean_importance: ranking.mean_importance[j],
                selected: selected.contains(&j),
            })
            .collect(),
    };
    let cutoff = Cutoff {
        protocol: opts.cutoff_protocol,
        threshold: youden.threshold,
        youden_j: youden.j,
    };
    Ok(ClassifyOutput {
        metrics: MetricsOutput {
            seeds,
            n_train: train.n_rows(),
            n_test: test.n_rows(),
            n_selected: names.len(),
            cutoff_protocol: opts.cutoff_protocol,
            optimistic_cutoff: opts.cutoff_protocol == CutoffProtocol::Test,
            normalizer_fit: opts.normalizer_fit,
            cv_auc: search.best_auc,
            metrics,
        },
        model: ModelArtifact {
            seeds,
            normalizer,
            selected_features: names,
            params: search.best,
            cv_auc: search.best_auc,
            cutoff,
            model,
        },
        selection,
        roc_csv: test_curve.to_csv(),
    })
}

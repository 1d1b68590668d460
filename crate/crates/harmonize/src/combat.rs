use std::collections::BTreeMap;

use texharm_core::FeatureTable;

use crate::error::HarmonizeError;

/// Location/scale parameters of one feature.
#[derive(Debug, Clone, PartialEq)]
struct FeatureFit {
    mean: f64,
    sd: f64,
    /// `(gamma, delta)` per batch in the model's batch order; `None` when the
    /// feature is passed through unchanged.
    batches: Option<Vec<(f64, f64)>>,
}

/// ComBat location/scale adjustment without empirical-Bayes shrinkage.
///
/// Per feature, values are standardized by the grand mean and the pooled
/// within-batch standard deviation; each batch's mean (`gamma`) and standard
/// deviation (`delta`) on that scale are then removed. Features with zero
/// variance inside any batch are left untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct CombatModel {
    batches: Vec<String>,
    features: Vec<String>,
    fits: Vec<FeatureFit>,
}

fn batch_indices(table: &FeatureTable) -> BTreeMap<String, Vec<usize>> {
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, row) in table.rows().iter().enumerate() {
        groups.entry(row.cohort.clone()).or_default().push(i);
    }
    groups
}

fn mean_var(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}

impl CombatModel {
    /// Fits the adjustment using the `cohort` column as the batch label.
    pub fn fit(table: &FeatureTable) -> Result<Self, HarmonizeError> {
        let groups = batch_indices(table);
        if groups.is_empty() {
            return Err(HarmonizeError::EmptyCohort("<all>".into()));
        }
        for (batch, idx) in &groups {
            if idx.len() < 2 {
                return Err(HarmonizeError::SingletonBatch {
                    batch: batch.clone(),
                    rows: idx.len(),
                });
            }
        }
        let n = table.n_rows() as f64;
        let fits = (0..table.n_features())
            .map(|j| {
                let col = table.column(j);
                let mean = col.iter().sum::<f64>() / n;
                let moments: Vec<(f64, f64)> = groups
                    .values()
                    .map(|idx| mean_var(idx.iter().map(|&i| col[i])))
                    .collect();
                let pooled = groups
                    .values()
                    .zip(&moments)
                    .map(|(idx, &(m, _))| idx.iter().map(|&i| (col[i] - m).powi(2)).sum::<f64>())
                    .sum::<f64>()
                    / n;
                let sd = pooled.sqrt();
                if groups.len() < 2 || moments.iter().any(|&(_, v)| v <= 0.0) || sd <= 0.0 {
                    return FeatureFit {
                        mean,
                        sd,
                        batches: None,
                    };
                }
                let params = groups
                    .values()
                    .map(|idx| {
                        let (g, d2) = mean_var(idx.iter().map(|&i| (col[i] - mean) / sd));
                        (g, d2.sqrt())
                    })
                    .collect();
                FeatureFit {
                    mean,
                    sd,
                    batches: Some(params),
                }
            })
            .collect();
        Ok(Self {
            batches: groups.into_keys().collect(),
            features: table.feature_names().to_vec(),
            fits,
        })
    }

    pub fn batches(&self) -> &[String] {
        &self.batches
    }

    /// Number of features that are actually adjusted (not passed through).
    pub fn n_adjusted(&self) -> usize {
        self.fits.iter().filter(|f| f.batches.is_some()).count()
    }

    /// Adjusts every row; rows must belong to batches seen during fitting.
    pub fn apply(&self, table: &FeatureTable) -> Result<FeatureTable, HarmonizeError> {
        if table.feature_names() != self.features.as_slice() {
            return Err(HarmonizeError::FeatureMismatch);
        }
        let mut values = Vec::with_capacity(table.n_rows());
        for row in table.rows() {
            let b = self
                .batches
                .iter()
                .position(|name| *name == row.cohort)
                .ok_or_else(|| HarmonizeError::UnknownBatch(row.cohort.clone()))?;
            values.push(
                row.values
                    .iter()
                    .zip(&self.fits)
                    .map(|(&y, fit)| match &fit.batches {
                        None => y,
                        Some(params) => {
                            let (gamma, delta) = params[b];
                            let z = (y - fit.mean) / fit.sd;
                            (z - gamma) / delta * fit.sd + fit.mean
                        }
                    })
                    .collect(),
            );
        }
        Ok(table.with_values(values)?)
    }
}

/// Fits on `table` and adjusts it in one step. A single batch is returned as is.
pub fn combat_adjust(table: &FeatureTable) -> Result<FeatureTable, HarmonizeError> {
    let model = CombatModel::fit(table)?;
    if model.batches.len() < 2 {
        return Ok(table.clone());
    }
    model.apply(table)
}

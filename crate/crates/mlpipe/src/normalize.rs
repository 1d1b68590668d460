use serde::{Deserialize, Serialize};
use texharm_core::{stats, FeatureTable};

use crate::error::MlError;
use crate::yeojohnson::{fit_lambda, yeo_johnson};

/// How one column is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnStatus {
    /// Maximum-likelihood lambda.
    Fitted,
    /// Two distinct values: no likelihood maximum, lambda fixed at 1.
    Identity,
    /// Constant column, emitted as all zeros.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnTransform {
    pub feature: String,
    pub lambda: f64,
    pub mean: f64,
    pub std: f64,
    pub status: ColumnStatus,
}

/// Per-feature Yeo-Johnson lambda followed by z-scoring with the
/// transformed training mean and (population) standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerTransform {
    pub columns: Vec<ColumnTransform>,
}

fn fit_column(feature: &str, values: &[f64]) -> ColumnTransform {
    let constant = values.windows(2).all(|w| w[0] == w[1]);
    let (lambda, status) = if constant {
        (1.0, ColumnStatus::Constant)
    } else {
        match fit_lambda(values) {
            Ok(l) => (l, ColumnStatus::Fitted),
            Err(_) => (1.0, ColumnStatus::Identity),
        }
    };
    let mut col = ColumnTransform {
        feature: feature.to_string(),
        lambda,
        mean: 0.0,
        std: 1.0,
        status,
    };
    if status != ColumnStatus::Constant {
        let t: Vec<f64> = values.iter().map(|&x| yeo_johnson(x, lambda)).collect();
        let (mean, std) = (stats::mean(&t), stats::std_dev(&t));
        if std > 0.0 && std.is_finite() && mean.is_finite() {
            (col.mean, col.std) = (mean, std);
        } else if status == ColumnStatus::Fitted {
            // extreme lambda overflowed; the identity transform is always usable
            return fit_with_identity(feature, values);
        } else {
            col.status = ColumnStatus::Constant;
        }
    }
    col
}

fn fit_with_identity(feature: &str, values: &[f64]) -> ColumnTransform {
    let (mean, std) = (stats::mean(values), stats::std_dev(values));
    ColumnTransform {
        feature: feature.to_string(),
        lambda: 1.0,
        mean,
        std,
        status: ColumnStatus::Identity,
    }
}

/// Fits one transform per column of `train`. Constant columns are flagged
/// (see [`PowerTransform::constant_features`]) rather than failing the fit.
pub fn fit_normalizer(train: &FeatureTable) -> Result<PowerTransform, MlError> {
    if train.n_rows() == 0 {
        return Err(MlError::TooFewRows { rows: 0, min: 1 });
    }
    let columns = train
        .feature_names()
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let col = train.column(j);
            if col.iter().any(|v| !v.is_finite()) {
                return Err(MlError::DegenerateInput(format!("{name} has a non-finite value")));
            }
            Ok(fit_column(name, &col))
        })
        .collect::<Result<_, _>>()?;
    Ok(PowerTransform { columns })
}

pub fn apply_normalizer(t: &PowerTransform, table: &FeatureTable) -> Result<FeatureTable, MlError> {
    t.apply(table)
}

impl PowerTransform {
    pub fn lambdas(&self) -> Vec<f64> {
        self.columns.iter().map(|c| c.lambda).collect()
    }

    pub fn constant_features(&self) -> Vec<&str> {
        self.columns
            .iter()
            .filter(|c| c.status == ColumnStatus::Constant)
            .map(|c| c.feature.as_str())
            .collect()
    }

    pub fn transform_value(&self, j: usize, x: f64) -> f64 {
        let c = &self.columns[j];
        match c.status {
            ColumnStatus::Constant => 0.0,
            _ => (yeo_johnson(x, c.lambda) - c.mean) / c.std,
        }
    }

    /// Applies the stored parameters; `table` must have the fitted columns in order.
    pub fn apply(&self, table: &FeatureTable) -> Result<FeatureTable, MlError> {
        let same = table.n_features() == self.columns.len()
            && table
                .feature_names()
                .iter()
                .zip(&self.columns)
                .all(|(n, c)| *n == c.feature);
        if !same {
            return Err(MlError::Shape("table columns differ from the fitted columns".into()));
        }
        let values = table
            .rows()
            .iter()
            .map(|r| {
                r.values
                    .iter()
                    .enumerate()
                    .map(|(j, &x)| self.transform_value(j, x))
                    .collect()
            })
            .collect();
        Ok(table.with_values(values)?)
    }
}

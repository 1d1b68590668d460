use texharm_core::CoreError;
use texharm_evalstats::EvalError;

#[derive(Debug, thiserror::Error)]
pub enum MlError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("both classes must be present (positives: {positives}, negatives: {negatives})")]
    SingleClass { positives: usize, negatives: usize },
    #[error("{rows} rows is too few (need at least {min})")]
    TooFewRows { rows: usize, min: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub(crate) fn class_counts(y: &[u8]) -> Result<(usize, usize), MlError> {
    if let Some(&l) = y.iter().find(|&&l| l > 1) {
        return Err(MlError::InvalidParams(format!("label {l} is not 0 or 1")));
    }
    let positives = y.iter().filter(|&&l| l == 1).count();
    let negatives = y.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(MlError::SingleClass { positives, negatives });
    }
    Ok((negatives, positives))
}

/// Checks that `x` is a rectangular, finite matrix with one row per label.
pub(crate) fn check_matrix(x: &[Vec<f64>], n_labels: usize) -> Result<usize, MlError> {
    if x.len() != n_labels {
        return Err(MlError::Shape(format!("{} rows but {n_labels} targets", x.len())));
    }
    let p = x.first().map_or(0, Vec::len);
    if p == 0 {
        return Err(MlError::Shape("no features".into()));
    }
    for (i, row) in x.iter().enumerate() {
        if row.len() != p {
            return Err(MlError::Shape(format!(
                "row {i} has {} values, expected {p}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(MlError::Shape(format!("row {i} has a non-finite value")));
        }
    }
    Ok(p)
}

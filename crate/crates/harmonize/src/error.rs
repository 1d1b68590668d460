use texharm_core::CoreError;

#[derive(Debug, thiserror::Error)]
pub enum HarmonizeError {
    #[error("no values to histogram")]
    EmptyInput,
    #[error("bin edges must be finite and strictly increasing")]
    NonMonotonicEdges,
    #[error("value {0} is not finite")]
    NonFinite(f64),
    #[error("value {value} lies outside the bin edges [{lo}, {hi}]")]
    OutsideEdges { value: f64, lo: f64, hi: f64 },
    #[error("distributions are defined over different bin edges")]
    EdgesMismatch,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("cohort `{0}` has no rows")]
    EmptyCohort(String),
    #[error("tables do not share the same feature columns")]
    FeatureMismatch,
    #[error("batch `{batch}` has {rows} row(s); at least 2 are needed")]
    SingletonBatch { batch: String, rows: usize },
    #[error("batch `{0}` was not seen when the adjustment was fitted")]
    UnknownBatch(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

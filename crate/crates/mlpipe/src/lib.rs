//! Modeling chain for harmonized radiomics tables: Yeo-Johnson plus z-score
//! normalization, stratified splitting, Boruta selection on random-forest
//! importances and least-squares gradient-boosted trees.

mod boruta;
mod error;
mod forest;
mod gbt;
mod normalize;
mod search;
mod split;
mod yeojohnson;

pub use boruta::{boruta, select_features, BorutaParams, BorutaResult, Decision, SelectionPolicy};
pub use error::MlError;
pub use forest::{rf_fit, rf_importance, RandomForest, RfParams, MIN_ROWS};
pub use gbt::{gbt_predict, gbt_train, GbtModel, GbtNode, GbtParams, RegressionTree};
pub use normalize::{apply_normalizer, fit_normalizer, ColumnStatus, ColumnTransform, PowerTransform};
pub use search::{cross_val_predict, default_grid, grid_search, stratified_folds, GridSearchResult, DEFAULT_FOLDS};
pub use split::{split, split_indices, DEFAULT_TRAIN_RATIO};
pub use yeojohnson::{fit_lambda, yeo_johnson, yeo_johnson_inverse, LAMBDA_RANGE};

//! Radiomics features for a 2D image and ROI.
//!
//! Intensities inside the ROI are binned with a fixed width ([`discretize`]),
//! texture matrices are accumulated over the binned grid and each family's
//! features are computed from its matrix. [`extract_all`] concatenates the 93
//! values in the canonical order given by [`feature_names`].

mod discretize;
mod error;
mod extract;
mod first_order;
mod glcm;
mod matrix;
mod names;
mod ngtdm;
mod sizes;

#[cfg(any(test, feature = "oracle"))]
pub mod oracle;

pub use crate::discretize::{discretize, DiscretizedRoi, DEFAULT_BIN_WIDTH};
pub use crate::error::RadiomicsError;
pub use crate::extract::{
    extract_all, extract_discretized, extract_with, feature_table, is_canonical_schema, ExtractionSettings,
    FeatureVector,
};
pub use crate::first_order::first_order;
pub use crate::glcm::{glcm, glcm_features, DIRECTIONS};
pub use crate::matrix::{MatrixKind, TextureMatrix};
pub use crate::names::{feature_names, Family, FEATURE_COUNT};
pub use crate::ngtdm::{ngtdm, ngtdm_features, NGTDM_COARSENESS_CAP};
pub use crate::sizes::{gldm, gldm_features, glrlm, glrlm_features, glszm, glszm_features};

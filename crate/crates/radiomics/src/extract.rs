use texharm_core::{validate_pair, FeatureRow, FeatureTable, GrayImage, RoiMask};

use crate::discretize::{discretize, DiscretizedRoi, DEFAULT_BIN_WIDTH};
use crate::error::RadiomicsError;
use crate::first_order::first_order;
use crate::glcm::{glcm, glcm_features};
use crate::names::{feature_names, Family, FEATURE_COUNT};
use crate::ngtdm::{ngtdm, ngtdm_features};
use crate::sizes::{gldm, gldm_features, glrlm, glrlm_features, glszm, glszm_features};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionSettings {
    pub bin_width: f64,
    pub glcm_distance: usize,
    pub gldm_alpha: u32,
}

impl Default for ExtractionSettings {
    fn default() -> Self {
        Self {
            bin_width: DEFAULT_BIN_WIDTH,
            glcm_distance: 1,
            gldm_alpha: 0,
        }
    }
}

/// The 93 feature values of one image, in the order of [`feature_names`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn names(&self) -> &'static [String] {
        feature_names()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        feature_names().iter().position(|n| n == name).map(|i| self.values[i])
    }

    pub fn family(&self, family: Family) -> &[f64] {
        &self.values[family.range()]
    }
}

/// Extracts all features with default settings and the given bin width.
pub fn extract_all(img: &GrayImage, mask: &RoiMask, bin_width: f64) -> Result<FeatureVector, RadiomicsError> {
    extract_with(
        img,
        mask,
        &ExtractionSettings {
            bin_width,
            ..Default::default()
        },
    )
}

pub fn extract_with(
    img: &GrayImage,
    mask: &RoiMask,
    settings: &ExtractionSettings,
) -> Result<FeatureVector, RadiomicsError> {
    validate_pair(img, mask)?;
    let d = discretize(img, mask, settings.bin_width)?;
    extract_discretized(&d, settings)
}

/// Feature vector of an already discretized ROI.
pub fn extract_discretized(d: &DiscretizedRoi, settings: &ExtractionSettings) -> Result<FeatureVector, RadiomicsError> {
    let mut values = Vec::with_capacity(FEATURE_COUNT);
    values.extend(first_order(d));
    values.extend(glcm_features(&glcm(d, settings.glcm_distance)?)?);
    values.extend(glrlm_features(&glrlm(d))?);
    values.extend(glszm_features(&glszm(d))?);
    values.extend(gldm_features(&gldm(d, settings.gldm_alpha))?);
    values.extend(ngtdm_features(&ngtdm(d))?);
    debug_assert_eq!(values.len(), FEATURE_COUNT);
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(RadiomicsError::InvalidInput(format!(
            "feature {} is not finite ({})",
            feature_names()[i],
            values[i]
        )));
    }
    Ok(FeatureVector { values })
}

/// Builds a table with the canonical columns; every row must carry 93 values.
pub fn feature_table(rows: Vec<FeatureRow>) -> Result<FeatureTable, RadiomicsError> {
    Ok(FeatureTable::new(feature_names().to_vec(), rows)?)
}

/// True when the table's columns are exactly the 93 canonical names in order.
pub fn is_canonical_schema(table: &FeatureTable) -> bool {
    table.feature_names() == feature_names()
}

//! Image preprocessing and the harmonization filter.
//!
//! The filter is a bank of small kernels applied as stride-1 cross-correlations
//! whose outputs are averaged into a single real-valued image of the input's
//! size. Nothing here re-quantizes intensities.

mod bank;
mod conv;
mod error;
mod geometry;

pub use crate::bank::{generate_synthetic_bank, SyntheticKind};
pub use crate::conv::{apply_filter_bank, convolve2d, output_dims, FilterApplicationConfig};
pub use crate::error::ImagingError;
pub use crate::geometry::{apply_field_mask, resize_mask_with_pad, resize_with_pad, DEFAULT_TARGET};

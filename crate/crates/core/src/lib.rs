//! Domain types shared across the texharm crates.
//!
//! Everything here is immutable once constructed: constructors validate their
//! invariants and there are no interior-mutability escape hatches, so values can
//! be shared freely between worker threads.

mod bank;
mod error;
mod image;
pub mod io;
mod report;
pub mod stats;
mod table;

pub use crate::bank::FilterBank;
pub use crate::error::{CoreError, Result};
pub use crate::image::{validate_pair, GrayImage, RoiMask};
pub use crate::report::DivergenceReport;
pub use crate::table::{FeatureRow, FeatureTable, PhaseMerge, METADATA_COLUMNS};

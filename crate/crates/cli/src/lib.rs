//! Orchestration for the `texharm` command line: synthetic cohorts,
//! filtering, extraction, divergence scoring and classification.

pub mod classify;
pub mod commands;
pub mod config;
pub mod error;
pub mod extract;
pub mod harmonize;
pub mod synth;

pub use classify::{classify_table, AccessLog, ClassifyOptions, ClassifyOutput, Stage};
pub use config::{CutoffProtocol, FilterOrder, NormalizerFit, PhaseMergeMode, PipelineConfig};
pub use error::{exit_code, DataError, UsageError};
pub use synth::{generate, write_cohort, ScannerStyle, SynthCase, SynthConfig};

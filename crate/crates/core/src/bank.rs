use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::io::write_atomic;

/// A bank of square convolution kernels with one bias per kernel.
///
/// Weights are kept in single precision, which is how pretrained stem weights
/// are distributed; arithmetic on them happens in `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    num_filters: usize,
    kernel_size: usize,
    weights: Vec<f32>,
    biases: Vec<f32>,
    source_tag: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    num_filters: usize,
    kernel_size: usize,
    biases: Vec<f32>,
    weights_file: String,
    source_tag: String,
}

impl FilterBank {
    /// `weights` is filter-major, then row-major within each kernel.
    pub fn new(
        num_filters: usize,
        kernel_size: usize,
        weights: Vec<f32>,
        biases: Vec<f32>,
        source_tag: impl Into<String>,
    ) -> Result<Self> {
        if num_filters == 0 {
            return Err(CoreError::invalid("filter bank", "num_filters must be >= 1"));
        }
        if kernel_size == 0 {
            return Err(CoreError::invalid("filter bank", "kernel_size must be >= 1"));
        }
        let expected = num_filters * kernel_size * kernel_size;
        if weights.len() != expected {
            return Err(CoreError::invalid(
                "filter bank",
                format!("expected {expected} weights, got {}", weights.len()),
            ));
        }
        if biases.len() != num_filters {
            return Err(CoreError::invalid(
                "filter bank",
                format!("expected {num_filters} biases, got {}", biases.len()),
            ));
        }
        if weights.iter().chain(&biases).any(|v| !v.is_finite()) {
            return Err(CoreError::invalid("filter bank", "non-finite weight or bias"));
        }
        Ok(Self {
            num_filters,
            kernel_size,
            weights,
            biases,
            source_tag: source_tag.into(),
        })
    }

    pub fn num_filters(&self) -> usize {
        self.num_filters
    }

    pub fn kernel_size(&self) -> usize {
        self.kernel_size
    }

    pub fn weights(&self) -> &[f32] {
        &self.weights
    }

    pub fn biases(&self) -> &[f32] {
        &self.biases
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    /// Row-major weights of kernel `n`.
    pub fn kernel(&self, n: usize) -> &[f32] {
        let k2 = self.kernel_size * self.kernel_size;
        &self.weights[n * k2..(n + 1) * k2]
    }

    pub fn bias(&self, n: usize) -> f32 {
        self.biases[n]
    }

    /// Reads a JSON manifest and the little-endian `f32` weight blob it names.
    /// A relative `weights_file` is resolved against the manifest's directory.
    pub fn load(manifest_path: impl AsRef<Path>) -> Result<Self> {
        let manifest_path = manifest_path.as_ref();
        let text = fs::read_to_string(manifest_path).map_err(|e| CoreError::io(manifest_path, e))?;
        let manifest: Manifest =
            serde_json::from_str(&text).map_err(|e| CoreError::format(manifest_path, e.to_string()))?;
        let blob_path = resolve_relative(manifest_path, &manifest.weights_file);
        let blob = fs::read(&blob_path).map_err(|e| CoreError::io(&blob_path, e))?;
        if blob.len() % 4 != 0 {
            return Err(CoreError::format(
                &blob_path,
                format!("blob length {} is not a multiple of 4", blob.len()),
            ));
        }
        let weights = blob
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Self::new(
            manifest.num_filters,
            manifest.kernel_size,
            weights,
            manifest.biases,
            manifest.source_tag,
        )
        .map_err(|e| CoreError::format(manifest_path, e.to_string()))
    }

    /// Writes `<manifest>` plus a sibling `<stem>.f32` weight blob.
    pub fn save(&self, manifest_path: impl AsRef<Path>) -> Result<()> {
        let manifest_path = manifest_path.as_ref();
        let stem = manifest_path.file_stem().and_then(|s| s.to_str()).unwrap_or("bank");
        let weights_file = format!("{stem}.f32");
        let blob_path = resolve_relative(manifest_path, &weights_file);
        let mut blob = Vec::with_capacity(self.weights.len() * 4);
        for w in &self.weights {
            blob.extend_from_slice(&w.to_le_bytes());
        }
        write_atomic(&blob_path, &blob)?;

        let manifest = Manifest {
            num_filters: self.num_filters,
            kernel_size: self.kernel_size,
            biases: self.biases.clone(),
            weights_file,
            source_tag: self.source_tag.clone(),
        };
        let mut json =
            serde_json::to_string_pretty(&manifest).map_err(|e| CoreError::format(manifest_path, e.to_string()))?;
        json.push('\n');
        write_atomic(manifest_path, json.as_bytes())
    }
}

fn resolve_relative(anchor: &Path, name: &str) -> PathBuf {
    let p = Path::new(name);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        anchor.parent().unwrap_or_else(|| Path::new(".")).join(p)
    }
}

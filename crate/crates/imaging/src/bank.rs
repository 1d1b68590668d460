use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use texharm_core::FilterBank;

use crate::error::ImagingError;

/// Families of synthetic banks used in place of pretrained stem weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    /// Unit-sum Gaussian blobs with random width and sub-pixel centre jitter,
    /// plus small random biases. Low-pass on average.
    GaussianRandom,
    /// Zero-sum difference of two centred Gaussians with random widths.
    DifferenceOfGaussians,
    /// Delta kernels at tap (1, 1), zero biases.
    Identity,
}

impl SyntheticKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SyntheticKind::GaussianRandom => "gaussian_random",
            SyntheticKind::DifferenceOfGaussians => "difference_of_gaussians",
            SyntheticKind::Identity => "identity",
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SyntheticKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian_random" => Ok(SyntheticKind::GaussianRandom),
            "difference_of_gaussians" => Ok(SyntheticKind::DifferenceOfGaussians),
            "identity" => Ok(SyntheticKind::Identity),
            other => Err(format!(
                "unknown bank kind `{other}` (expected gaussian_random|difference_of_gaussians|identity)"
            )),
        }
    }
}

fn gaussian_kernel(k: usize, sigma: f64, cy: f64, cx: f64) -> Vec<f64> {
    let mut w = Vec::with_capacity(k * k);
    for u in 0..k {
        for v in 0..k {
            let (dy, dx) = (u as f64 - cy, v as f64 - cx);
            w.push((-(dy * dy + dx * dx) / (2.0 * sigma * sigma)).exp());
        }
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

/// Deterministic synthetic bank; the same arguments always give the same bank.
pub fn generate_synthetic_bank(
    kind: SyntheticKind,
    num_filters: usize,
    kernel_size: usize,
    seed: u64,
) -> Result<FilterBank, ImagingError> {
    if num_filters == 0 || kernel_size == 0 {
        return Err(ImagingError::InvalidConfig(
            "synthetic bank needs at least one filter of size >= 1".into(),
        ));
    }
    let k = kernel_size;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centre = (k as f64 - 1.0) / 2.0;
    let mut weights = Vec::with_capacity(num_filters * k * k);
    let mut biases = Vec::with_capacity(num_filters);
    for _ in 0..num_filters {
        match kind {
            SyntheticKind::Identity => {
                let tap = if k >= 2 { k + 1 } else { 0 };
                weights.extend((0..k * k).map(|t| if t == tap { 1.0f32 } else { 0.0 }));
                biases.push(0.0);
            }
            SyntheticKind::GaussianRandom => {
                let sigma = rng.random_range(0.6..1.4);
                let cy = centre + rng.random_range(-0.25..0.25);
                let cx = centre + rng.random_range(-0.25..0.25);
                weights.extend(gaussian_kernel(k, sigma, cy, cx).into_iter().map(|w| w as f32));
                let noise = Normal::new(0.0, 0.1).expect("valid normal");
                biases.push(noise.sample(&mut rng) as f32);
            }
            SyntheticKind::DifferenceOfGaussians => {
                let s1: f64 = rng.random_range(0.5..0.9);
                let s2 = s1 * rng.random_range(1.6..2.2);
                let g1 = gaussian_kernel(k, s1, centre, centre);
                let g2 = gaussian_kernel(k, s2, centre, centre);
                let mut d: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| a - b).collect();
                let m = d.iter().sum::<f64>() / d.len() as f64;
                d.iter_mut().for_each(|x| *x -= m);
                weights.extend(d.into_iter().map(|w| w as f32));
                biases.push(0.0);
            }
        }
    }
    Ok(FilterBank::new(
        num_filters,
        k,
        weights,
        biases,
        format!("synthetic:{kind}:n={num_filters}:k={k}:seed={seed}"),
    )?)
}

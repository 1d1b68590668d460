//! Synthetic two-scanner, two-class phantom cohort.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use texharm_core::{io, GrayImage, RoiMask};

/// Acquisition model applied to a latent texture in [0, 255]:
/// `gain * 255 * (x / 255)^gamma + offset + noise_sd * N(0, 1)`, clamped and rounded to 8 bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScannerStyle {
    pub name: String,
    pub gain: f64,
    pub gamma: f64,
    pub offset: f64,
    pub noise_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub cases_per_class: usize,
    pub size: usize,
    /// Correlation length (Gaussian sigma, pixels) of the class-0 and class-1 textures.
    pub correlation_length: [f64; 2],
    /// Render the same latent cases in both styles; otherwise each style gets its own cases.
    pub paired: bool,
    pub styles: [ScannerStyle; 2],
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            cases_per_class: 100,
            size: 128,
            correlation_length: [2.0, 2.6],
            paired: true,
            styles: [
                ScannerStyle {
                    name: "scannerA".into(),
                    gain: 1.0,
                    gamma: 1.0,
                    offset: 0.0,
                    noise_sd: 16.0,
                },
                ScannerStyle {
                    name: "scannerB".into(),
                    gain: 0.9,
                    gamma: 0.85,
                    offset: 8.0,
                    noise_sd: 32.0,
                },
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCase {
    pub case_id: String,
    pub cohort: String,
    pub class_label: u8,
    pub phase: String,
    pub image: GrayImage,
    pub mask: RoiMask,
}

impl SynthCase {
    pub fn stem(&self) -> String {
        format!("{}_{}", self.case_id, self.phase)
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian_taps(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as isize;
    let taps: Vec<f64> = (-r..=r)
        .map(|d| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / s).collect()
}

/// White noise blurred by a Gaussian of the given sigma, rescaled to unit variance.
fn correlated_noise(rng: &mut ChaCha8Rng, size: usize, sigma: f64) -> Vec<f64> {
    let taps = gaussian_taps(sigma);
    let r = taps.len() / 2;
    let big = size + 2 * r;
    let white: Vec<f64> = (0..big * big).map(|_| StandardNormal.sample(&mut *rng)).collect();
    // horizontal pass over all rows, vertical pass restricted to the output window
    let mut tmp = vec![0.0; big * size];
    for y in 0..big {
        for x in 0..size {
            tmp[y * size + x] = taps.iter().enumerate().map(|(k, t)| t * white[y * big + x + k]).sum();
        }
    }
    let mut out = vec![0.0; size * size];
    for y in 0..size {
        for x in 0..size {
            out[y * size + x] = taps.iter().enumerate().map(|(k, t)| t * tmp[(y + k) * size + x]).sum();
        }
    }
    let n = out.len() as f64;
    let mean = out.iter().sum::<f64>() / n;
    let sd = (out.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    out.iter().map(|v| (v - mean) / sd).collect()
}

/// Union of three Gaussian blobs around the image centre, thresholded at 0.5.
fn blob_mask(rng: &mut ChaCha8Rng, size: usize) -> RoiMask {
    let s = size as f64;
    let blobs: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                s * rng.random_range(0.38..0.62),
                s * rng.random_range(0.38..0.62),
                s * rng.random_range(0.07..0.11),
            )
        })
        .collect();
    RoiMask::from_fn(size, size, |r, c| {
        let v: f64 = blobs
            .iter()
            .map(|&(cy, cx, sd)| {
                let d2 = (r as f64 - cy).powi(2) + (c as f64 - cx).powi(2);
                (-d2 / (2.0 * sd * sd)).exp()
            })
            .sum();
        v > 0.5
    })
    .expect("size is positive")
}

struct Latent {
    class_label: u8,
    texture: Vec<f64>,
    mask: RoiMask,
}

fn latent_case(cfg: &SynthConfig, index: u64, class_label: u8) -> Latent {
    let mut rng = rng_for(cfg.seed, index);
    let t = correlated_noise(&mut rng, cfg.size, cfg.correlation_length[class_label as usize]);
    let level = rng.random_range(95.0..125.0);
    let contrast = rng.random_range(28.0..36.0);
    // gentle random shading across the field
    let (gy, gx) = (rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1));
    let n = cfg.size;
    let texture = (0..n * n)
        .map(|i| {
            let (r, c) = ((i / n) as f64, (i % n) as f64);
            (level + contrast * t[i] + gy * r + gx * c).clamp(0.0, 255.0)
        })
        .collect();
    Latent {
        class_label,
        texture,
        mask: blob_mask(&mut rng, n),
    }
}

fn render(latent: &Latent, style: &ScannerStyle, rng: &mut ChaCha8Rng, size: usize) -> GrayImage {
    let pixels: Vec<u8> = latent
        .texture
        .iter()
        .map(|&x| {
            let e: f64 = StandardNormal.sample(&mut *rng);
            let v = style.gain * 255.0 * (x / 255.0).powf(style.gamma) + style.offset + style.noise_sd * e;
            v.round().clamp(0.0, 255.0) as u8
        })
        .collect();
    GrayImage::from_u8(size, size, &pixels).expect("size is positive")
}

/// All cases, ordered by cohort, class and index. Case ids are
/// `<style>-c<class>-<index>`; paired cohorts share index, texture and mask.
pub fn generate(cfg: &SynthConfig) -> Vec<SynthCase> {
    let mut cases = Vec::with_capacity(4 * cfg.cases_per_class);
    for (s, style) in cfg.styles.iter().enumerate() {
        for class_label in 0..2u8 {
            for i in 0..cfg.cases_per_class {
                let latent_index = if cfg.paired { 0 } else { s } * 2 * cfg.cases_per_class
                    + class_label as usize * cfg.cases_per_class
                    + i;
                let latent = latent_case(cfg, latent_index as u64, class_label);
                // acquisition noise streams live above the latent ones
                let mut rng = rng_for(
                    cfg.seed,
                    (1 << 32) + (s * 4 * cfg.cases_per_class + latent_index) as u64,
                );
                cases.push(SynthCase {
                    case_id: format!("{}-c{}-{:04}", style.name, class_label, i),
                    cohort: style.name.clone(),
                    class_label: latent.class_label,
                    phase: "ED".into(),
                    image: render(&latent, style, &mut rng, cfg.size),
                    mask: latent.mask.clone(),
                });
            }
        }
    }
    cases
}

/// Files written by [`write_cohort`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthLayout {
    pub image_dir: PathBuf,
    pub mask_dir: PathBuf,
    pub metadata: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Writes `images/<stem>.pgm`, `masks/<stem>.pgm` and `metadata.csv` under `dir`.
pub fn write_cohort(cases: &[SynthCase], dir: &Path) -> anyhow::Result<SynthLayout> {
    let image_dir = dir.join("images");
    let mask_dir = dir.join("masks");
    std::fs::create_dir_all(&image_dir)?;
    std::fs::create_dir_all(&mask_dir)?;
    let mut files = Vec::with_capacity(2 * cases.len() + 1);
    let mut meta = String::from("case_id,cohort,class_label,phase\n");
    for case in cases {
        let img = image_dir.join(format!("{}.pgm", case.stem()));
        let mask = mask_dir.join(format!("{}.pgm", case.stem()));
        io::write_pgm(&case.image, &img)?;
        io::write_mask(&case.mask, &mask)?;
        files.push(img);
        files.push(mask);
        meta.push_str(&format!(
            "{},{},{},{}\n",
            case.case_id, case.cohort, case.class_label, case.phase
        ));
    }
    let metadata = dir.join("metadata.csv");
    io::write_atomic(&metadata, meta.as_bytes())?;
    files.push(metadata.clone());
    Ok(SynthLayout {
        image_dir,
        mask_dir,
        metadata,
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SynthConfig {
        SynthConfig {
            cases_per_class: 3,
            size: 48,
            ..Default::default()
        }
    }

    #[test]
    fn deterministic_and_paired() {
        let cfg = small();
        let a = generate(&cfg);
        assert_eq!(a, generate(&cfg));
        assert_eq!(a.len(), 12);
        let (x, y) = (&a[0], &a[6]);
        assert_eq!(x.mask, y.mask);
        assert_ne!(x.image, y.image);
        assert!(x.mask.count() > 50);
    }

    #[test]
    fn unpaired_cases_differ() {
        let cfg = SynthConfig {
            paired: false,
            ..small()
        };
        let a = generate(&cfg);
        assert_ne!(a[0].mask, a[6].mask);
    }

    #[test]
    fn noise_is_unit_variance() {
        let mut rng = rng_for(1, 0);
        let t = correlated_noise(&mut rng, 64, 2.0);
        let m = t.iter().sum::<f64>() / t.len() as f64;
        let v = t.iter().map(|x| (x - m).powi(2)).sum::<f64>() / t.len() as f64;
        assert!(m.abs() < 1e-12 && (v - 1.0).abs() < 1e-12);
    }
}

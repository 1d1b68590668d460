use texharm_core::{FilterBank, GrayImage};

use crate::error::ImagingError;

/// Padding and stride used when a kernel is slid over an image.
///
/// The input is first extended by `extra_pixel_pad` zero pixels on the bottom
/// and right, then by `conv_padding` zero pixels on every side. With a 4x4
/// kernel and the defaults (1, 1, 1) the output has the input's shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FilterApplicationConfig {
    pub conv_padding: usize,
    pub extra_pixel_pad: usize,
    pub stride: usize,
}

impl Default for FilterApplicationConfig {
    fn default() -> Self {
        Self {
            conv_padding: 1,
            extra_pixel_pad: 1,
            stride: 1,
        }
    }
}

/// Output `(width, height)` for an input of the given size, or `None` when the
/// kernel does not fit inside the padded input.
pub fn output_dims(
    width: usize,
    height: usize,
    kernel_size: usize,
    cfg: &FilterApplicationConfig,
) -> Option<(usize, usize)> {
    let pw = width + cfg.extra_pixel_pad + 2 * cfg.conv_padding;
    let ph = height + cfg.extra_pixel_pad + 2 * cfg.conv_padding;
    if kernel_size == 0 || cfg.stride == 0 || kernel_size > pw || kernel_size > ph {
        return None;
    }
    Some(((pw - kernel_size) / cfg.stride + 1, (ph - kernel_size) / cfg.stride + 1))
}

/// Zero-padded copy of the image laid out row-major.
struct Padded {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Padded {
    fn new(img: &GrayImage, cfg: &FilterApplicationConfig) -> Self {
        let p = cfg.conv_padding;
        let width = img.width() + cfg.extra_pixel_pad + 2 * p;
        let height = img.height() + cfg.extra_pixel_pad + 2 * p;
        let mut data = vec![0.0; width * height];
        for r in 0..img.height() {
            let src = &img.data()[r * img.width()..(r + 1) * img.width()];
            let start = (r + p) * width + p;
            data[start..start + img.width()].copy_from_slice(src);
        }
        Self { width, height, data }
    }
}

fn check_fit(
    img: &GrayImage,
    kernel_size: usize,
    cfg: &FilterApplicationConfig,
) -> Result<(usize, usize), ImagingError> {
    if cfg.stride == 0 {
        return Err(ImagingError::InvalidConfig("stride must be >= 1".into()));
    }
    output_dims(img.width(), img.height(), kernel_size, cfg).ok_or(ImagingError::KernelTooLarge {
        kernel: kernel_size,
        padded_w: img.width() + cfg.extra_pixel_pad + 2 * cfg.conv_padding,
        padded_h: img.height() + cfg.extra_pixel_pad + 2 * cfg.conv_padding,
    })
}

/// Cross-correlates `img` with one square kernel (no flip, no activation).
///
/// `out(i, j) = bias + sum_{u,v} kernel(u, v) * padded(i*s + u, j*s + v)`, with the
/// products accumulated in row-major kernel order.
pub fn convolve2d(
    img: &GrayImage,
    kernel: &[f64],
    bias: f64,
    cfg: &FilterApplicationConfig,
) -> Result<GrayImage, ImagingError> {
    let k = (kernel.len() as f64).sqrt().round() as usize;
    if k * k != kernel.len() || k == 0 {
        return Err(ImagingError::KernelShape {
            len: kernel.len(),
            size: k,
        });
    }
    let (ow, oh) = check_fit(img, k, cfg)?;
    let padded = Padded::new(img, cfg);
    let s = cfg.stride;
    let mut out = Vec::with_capacity(ow * oh);
    for i in 0..oh {
        for j in 0..ow {
            let mut acc = 0.0;
            for u in 0..k {
                let row = &padded.data[(i * s + u) * padded.width + j * s..];
                for v in 0..k {
                    acc += kernel[u * k + v] * row[v];
                }
            }
            out.push(bias + acc);
        }
    }
    debug_assert!(padded.height >= k);
    Ok(GrayImage::new(ow, oh, out)?)
}

/// Applies every kernel of the bank and averages the outputs pixel-wise.
///
/// Each per-filter value is computed exactly as [`convolve2d`] computes it; the
/// values are then summed in filter order and divided by the filter count, so
/// the result is bit-identical to averaging the single-filter outputs.
pub fn apply_filter_bank(
    img: &GrayImage,
    bank: &FilterBank,
    cfg: &FilterApplicationConfig,
) -> Result<GrayImage, ImagingError> {
    let k = bank.kernel_size();
    let (ow, oh) = check_fit(img, k, cfg)?;
    let n = bank.num_filters();
    let k2 = k * k;

    // Tap-major weights so the per-tap update runs across all filters at once.
    let mut taps = vec![0.0f64; k2 * n];
    for f in 0..n {
        for (t, &w) in bank.kernel(f).iter().enumerate() {
            taps[t * n + f] = f64::from(w);
        }
    }
    let biases: Vec<f64> = bank.biases().iter().map(|&b| f64::from(b)).collect();

    let padded = Padded::new(img, cfg);
    let s = cfg.stride;
    let mut window = vec![0.0f64; k2];
    let mut acc = vec![0.0f64; n];
    let mut out = Vec::with_capacity(ow * oh);
    let nf = n as f64;
    for i in 0..oh {
        for j in 0..ow {
            for u in 0..k {
                let base = (i * s + u) * padded.width + j * s;
                window[u * k..(u + 1) * k].copy_from_slice(&padded.data[base..base + k]);
            }
            acc.iter_mut().for_each(|a| *a = 0.0);
            for (t, &x) in window.iter().enumerate() {
                let w = &taps[t * n..(t + 1) * n];
                for (a, &wt) in acc.iter_mut().zip(w) {
                    *a += wt * x;
                }
            }
            let mut total = 0.0;
            for (a, b) in acc.iter().zip(&biases) {
                total += b + a;
            }
            out.push(total / nf);
        }
    }
    Ok(GrayImage::new(ow, oh, out)?)
}

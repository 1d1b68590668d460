use texharm_core::{GrayImage, RoiMask};

use crate::error::ImagingError;

pub const DEFAULT_TARGET: usize = 448;

/// Placement of the scaled content inside the `target x target` canvas.
struct Layout {
    scaled_w: usize,
    scaled_h: usize,
    off_x: usize,
    off_y: usize,
}

fn layout(width: usize, height: usize, target: usize) -> Layout {
    let scale = target as f64 / width.max(height) as f64;
    let scaled_w = ((width as f64 * scale).round() as usize).clamp(1, target);
    let scaled_h = ((height as f64 * scale).round() as usize).clamp(1, target);
    Layout {
        scaled_w,
        scaled_h,
        // odd remainders go to the bottom/right
        off_x: (target - scaled_w) / 2,
        off_y: (target - scaled_h) / 2,
    }
}

/// Source coordinate for destination index `dst` under half-pixel-centre alignment.
#[inline]
fn source_coord(dst: usize, src_len: usize, dst_len: usize) -> (usize, usize, f64) {
    let ratio = src_len as f64 / dst_len as f64;
    let x = ((dst as f64 + 0.5) * ratio - 0.5).clamp(0.0, (src_len - 1) as f64);
    let x0 = x.floor() as usize;
    let x1 = (x0 + 1).min(src_len - 1);
    (x0, x1, x - x0 as f64)
}

fn resample(width: usize, height: usize, target: usize, sample: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let l = layout(width, height, target);
    let cols: Vec<_> = (0..l.scaled_w).map(|x| source_coord(x, width, l.scaled_w)).collect();
    let mut out = vec![0.0; target * target];
    for y in 0..l.scaled_h {
        let (y0, y1, fy) = source_coord(y, height, l.scaled_h);
        let row = &mut out[(y + l.off_y) * target + l.off_x..];
        for (x, &(x0, x1, fx)) in cols.iter().enumerate() {
            let (a, b) = (sample(y0, x0), sample(y0, x1));
            let (c, d) = (sample(y1, x0), sample(y1, x1));
            // a + (b - a) * f keeps constant regions exactly constant
            let top = a + (b - a) * fx;
            let bottom = c + (d - c) * fx;
            row[x] = top + (bottom - top) * fy;
        }
    }
    out
}

/// Scales the image by `target / max(width, height)` with bilinear
/// interpolation and centres it on a zero-filled `target x target` canvas.
pub fn resize_with_pad(img: &GrayImage, target: usize) -> Result<GrayImage, ImagingError> {
    if target == 0 {
        return Err(ImagingError::InvalidConfig("resize target must be >= 1".into()));
    }
    let data = resample(img.width(), img.height(), target, |r, c| img.get(r, c));
    Ok(GrayImage::new(target, target, data)?)
}

/// Resizes a mask with the same geometry as [`resize_with_pad`]; a pixel is
/// foreground when its interpolated coverage is at least one half.
pub fn resize_mask_with_pad(mask: &RoiMask, target: usize) -> Result<RoiMask, ImagingError> {
    if target == 0 {
        return Err(ImagingError::InvalidConfig("resize target must be >= 1".into()));
    }
    let data = resample(mask.width(), mask.height(), target, |r, c| {
        if mask.get(r, c) {
            1.0
        } else {
            0.0
        }
    });
    Ok(RoiMask::new(target, target, data.iter().map(|&v| v >= 0.5).collect())?)
}

/// Zeroes every pixel outside the imaging field.
pub fn apply_field_mask(img: &GrayImage, field: &RoiMask) -> Result<GrayImage, ImagingError> {
    field.ensure_same_shape(img)?;
    let data = img
        .data()
        .iter()
        .zip(field.data())
        .map(|(&v, &inside)| if inside { v } else { 0.0 })
        .collect();
    Ok(GrayImage::new(img.width(), img.height(), data)?)
}

use texharm_core::{CoreError, GrayImage, RoiMask};

use crate::error::RadiomicsError;

pub const DEFAULT_BIN_WIDTH: f64 = 5.0;

/// Gray levels of an ROI on a grid cropped to the ROI's bounding box.
///
/// Level 0 marks pixels outside the ROI; ROI pixels carry levels in `1..=ng`.
/// The raw (undiscretized) ROI intensities are kept in row-major order for the
/// first-order statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedRoi {
    width: usize,
    height: usize,
    origin: (usize, usize),
    levels: Vec<u32>,
    ng: u32,
    roi_values: Vec<f64>,
}

impl DiscretizedRoi {
    /// Builds an ROI straight from a level grid (0 = outside). Raw values are
    /// taken to be the levels themselves. Mostly useful for tests and oracles.
    pub fn from_levels(width: usize, height: usize, levels: Vec<u32>) -> Result<Self, RadiomicsError> {
        if width == 0 || height == 0 || levels.len() != width * height {
            return Err(RadiomicsError::InvalidInput(format!(
                "level grid of length {} does not match {width}x{height}",
                levels.len()
            )));
        }
        let roi_values: Vec<f64> = levels.iter().filter(|&&l| l > 0).map(|&l| f64::from(l)).collect();
        if roi_values.is_empty() {
            return Err(CoreError::DegenerateRoi("mask has no foreground pixels".into()).into());
        }
        let ng = levels.iter().copied().max().unwrap_or(0);
        Ok(Self {
            width,
            height,
            origin: (0, 0),
            levels,
            ng,
            roi_values,
        })
    }

    /// Width of the stored grid.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `(row, col)` of the grid's top-left corner in the source image.
    pub fn origin(&self) -> (usize, usize) {
        self.origin
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    #[inline]
    pub fn level(&self, row: usize, col: usize) -> u32 {
        self.levels[row * self.width + col]
    }

    /// Level at a signed position; 0 outside the grid.
    #[inline]
    pub fn level_at(&self, row: isize, col: isize) -> u32 {
        if row < 0 || col < 0 || row as usize >= self.height || col as usize >= self.width {
            0
        } else {
            self.levels[row as usize * self.width + col as usize]
        }
    }

    /// Number of gray levels (the highest level present).
    pub fn ng(&self) -> u32 {
        self.ng
    }

    pub fn roi_values(&self) -> &[f64] {
        &self.roi_values
    }

    /// Number of ROI pixels.
    pub fn n_pixels(&self) -> usize {
        self.roi_values.len()
    }

    /// Histogram of ROI levels; index `i` counts level `i + 1`.
    pub fn level_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.ng as usize];
        for &l in &self.levels {
            if l > 0 {
                counts[l as usize - 1] += 1;
            }
        }
        counts
    }
}

/// Fixed-bin-width discretization anchored at the ROI minimum:
/// `level(x) = floor(x / w) - floor(min / w) + 1`.
pub fn discretize(img: &GrayImage, mask: &RoiMask, bin_width: f64) -> Result<DiscretizedRoi, RadiomicsError> {
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(RadiomicsError::InvalidInput(format!(
            "bin width must be positive and finite, got {bin_width}"
        )));
    }
    mask.ensure_same_shape(img)?;
    let (r0, c0, r1, c1) = mask
        .bounding_box()
        .ok_or_else(|| CoreError::DegenerateRoi("mask has no foreground pixels".into()))?;
    let (width, height) = (c1 - c0 + 1, r1 - r0 + 1);

    let mut min = f64::INFINITY;
    let mut roi_values = Vec::new();
    for r in r0..=r1 {
        for c in c0..=c1 {
            if mask.get(r, c) {
                let v = img.get(r, c);
                min = min.min(v);
                roi_values.push(v);
            }
        }
    }
    let base = (min / bin_width).floor();
    let mut levels = vec![0u32; width * height];
    let mut ng = 0u32;
    for r in r0..=r1 {
        for c in c0..=c1 {
            if mask.get(r, c) {
                let l = ((img.get(r, c) / bin_width).floor() - base) as u32 + 1;
                ng = ng.max(l);
                levels[(r - r0) * width + (c - c0)] = l;
            }
        }
    }
    Ok(DiscretizedRoi {
        width,
        height,
        origin: (r0, c0),
        levels,
        ng,
        roi_values,
    })
}

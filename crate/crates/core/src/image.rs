use crate::error::{CoreError, Result};

/// A single-channel image with real-valued intensities, stored row-major.
///
/// Raw inputs hold integral values in `[0, 255]`; filtered images hold
/// arbitrary finite reals and are never re-quantized.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(CoreError::invalid(
                "image",
                format!("dimensions must be positive, got {width}x{height}"),
            ));
        }
        if data.len() != width * height {
            return Err(CoreError::invalid(
                "image",
                format!("data length {} does not match {width}x{height}", data.len()),
            ));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(CoreError::invalid(
                "image",
                format!("non-finite intensity at index {pos}"),
            ));
        }
        Ok(Self { width, height, data })
    }

    /// Builds a raw 8-bit image.
    pub fn from_u8(width: usize, height: usize, data: &[u8]) -> Result<Self> {
        Self::new(width, height, data.iter().map(|&v| f64::from(v)).collect())
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    /// True when every value is an integer in `[0, 255]`.
    pub fn is_raw_range(&self) -> bool {
        self.data
            .iter()
            .all(|&v| (0.0..=255.0).contains(&v) && v.fract() == 0.0)
    }

    /// Element-wise map into a new image of the same shape.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.width, self.height, self.data.iter().map(|&v| f(v)).collect())
    }
}

/// Binary region-of-interest mask, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoiMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl RoiMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(CoreError::invalid(
                "mask",
                format!("dimensions must be positive, got {width}x{height}"),
            ));
        }
        if data.len() != width * height {
            return Err(CoreError::invalid(
                "mask",
                format!("data length {} does not match {width}x{height}", data.len()),
            ));
        }
        Ok(Self { width, height, data })
    }

    pub fn full(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![true; width * height])
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row * self.width + col]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// Inclusive bounding box `(row0, col0, row1, col1)` of the foreground.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bbox: Option<(usize, usize, usize, usize)> = None;
        for r in 0..self.height {
            for c in 0..self.width {
                if self.get(r, c) {
                    bbox = Some(match bbox {
                        None => (r, c, r, c),
                        Some((r0, c0, r1, c1)) => (r0.min(r), c0.min(c), r1.max(r), c1.max(c)),
                    });
                }
            }
        }
        bbox
    }

    pub fn ensure_same_shape(&self, img: &GrayImage) -> Result<()> {
        if self.width != img.width() || self.height != img.height() {
            return Err(CoreError::DimensionMismatch {
                image_w: img.width(),
                image_h: img.height(),
                mask_w: self.width,
                mask_h: self.height,
            });
        }
        Ok(())
    }
}

/// Checks that `mask` can be used to extract texture features from `img`.
///
/// The mask must have the image's shape and cover at least two pixels that
/// carry at least two distinct intensities.
pub fn validate_pair(img: &GrayImage, mask: &RoiMask) -> Result<()> {
    mask.ensure_same_shape(img)?;
    let mut roi = img.data().iter().zip(mask.data()).filter(|(_, &m)| m).map(|(&v, _)| v);
    let first = match roi.next() {
        Some(v) => v,
        None => return Err(CoreError::DegenerateRoi("mask has no foreground pixels".into())),
    };
    let mut n = 1usize;
    let mut distinct = false;
    for v in roi {
        n += 1;
        distinct |= v != first;
    }
    if n < 2 {
        return Err(CoreError::DegenerateRoi("mask has a single foreground pixel".into()));
    }
    if !distinct {
        return Err(CoreError::DegenerateRoi(format!(
            "all {n} foreground pixels share intensity {first}"
        )));
    }
    Ok(())
}

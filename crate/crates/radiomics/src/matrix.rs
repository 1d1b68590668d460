use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixKind {
    Glcm,
    Glrlm,
    Glszm,
    Gldm,
    Ngtdm,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixKind::Glcm => "GLCM",
            MatrixKind::Glrlm => "GLRLM",
            MatrixKind::Glszm => "GLSZM",
            MatrixKind::Gldm => "GLDM",
            MatrixKind::Ngtdm => "NGTDM",
        })
    }
}

/// Raw counts of one texture matrix, possibly one layer per direction.
///
/// Row `i` corresponds to gray level `i + 1`. Column meaning depends on the kind:
///
/// * GLCM: gray level `j + 1` of the neighbor (`ng` columns, symmetric counts).
/// * GLRLM: run length `j + 1`.
/// * GLSZM: zone size `j + 1`.
/// * GLDM: dependence `j + 1` (number of dependent neighbors plus one).
/// * NGTDM: column 0 holds `n_i`, column 1 holds `s_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TextureMatrix {
    kind: MatrixKind,
    rows: usize,
    cols: usize,
    layers: Vec<Vec<f64>>,
    offsets: Vec<(isize, isize)>,
    n_pixels: usize,
}

impl TextureMatrix {
    pub(crate) fn new(
        kind: MatrixKind,
        rows: usize,
        cols: usize,
        layers: Vec<Vec<f64>>,
        offsets: Vec<(isize, isize)>,
        n_pixels: usize,
    ) -> Self {
        debug_assert!(layers.iter().all(|l| l.len() == rows * cols));
        Self {
            kind,
            rows,
            cols,
            layers,
            offsets,
            n_pixels,
        }
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, index: usize) -> &[f64] {
        &self.layers[index]
    }

    #[inline]
    pub fn get(&self, layer: usize, row: usize, col: usize) -> f64 {
        self.layers[layer][row * self.cols + col]
    }

    /// `(drow, dcol)` offset of each layer; empty for direction-free kinds.
    pub fn offsets(&self) -> &[(isize, isize)] {
        &self.offsets
    }

    /// Number of ROI pixels the matrix was built from.
    pub fn n_pixels(&self) -> usize {
        self.n_pixels
    }

    /// Total mass of a layer; for NGTDM the number of pixels with neighbors.
    pub fn total(&self, layer: usize) -> f64 {
        match self.kind {
            MatrixKind::Ngtdm => (0..self.rows).map(|i| self.get(layer, i, 0)).sum(),
            _ => self.layers[layer].iter().sum(),
        }
    }

    /// Probabilities of one layer. For NGTDM this is the vector `p_i`.
    /// Returns `None` for an empty layer.
    pub fn normalized(&self, layer: usize) -> Option<Vec<f64>> {
        let total = self.total(layer);
        if total <= 0.0 {
            return None;
        }
        Some(match self.kind {
            MatrixKind::Ngtdm => (0..self.rows).map(|i| self.get(layer, i, 0) / total).collect(),
            _ => self.layers[layer].iter().map(|v| v / total).collect(),
        })
    }

    /// Copy holding only one layer.
    pub fn select_layer(&self, index: usize) -> TextureMatrix {
        TextureMatrix {
            kind: self.kind,
            rows: self.rows,
            cols: self.cols,
            layers: vec![self.layers[index].clone()],
            offsets: self.offsets.get(index).map(|&o| vec![o]).unwrap_or_default(),
            n_pixels: self.n_pixels,
        }
    }
}

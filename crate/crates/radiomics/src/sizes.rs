//! Run-length, size-zone and dependence matrices. All three are gray level by
//! "size" count matrices and share one feature formula set.

use std::collections::VecDeque;

use crate::discretize::DiscretizedRoi;
use crate::error::{degenerate, RadiomicsError};
use crate::glcm::DIRECTIONS;
use crate::matrix::{MatrixKind, TextureMatrix};

const NEIGHBORS: [(isize, isize); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

/// Run-length counts along each of the four directions.
pub fn glrlm(d: &DiscretizedRoi) -> TextureMatrix {
    let ng = d.ng() as usize;
    let cols = d.width().max(d.height());
    let mut layers = Vec::with_capacity(DIRECTIONS.len());
    for &(dr, dc) in &DIRECTIONS {
        let mut p = vec![0.0; ng * cols];
        for r in 0..d.height() as isize {
            for c in 0..d.width() as isize {
                let a = d.level_at(r, c);
                if a == 0 || d.level_at(r - dr, c - dc) == a {
                    continue;
                }
                let mut len = 1;
                while d.level_at(r + dr * len as isize, c + dc * len as isize) == a {
                    len += 1;
                }
                p[(a as usize - 1) * cols + len - 1] += 1.0;
            }
        }
        layers.push(p);
    }
    TextureMatrix::new(MatrixKind::Glrlm, ng, cols, layers, DIRECTIONS.to_vec(), d.n_pixels())
}

/// Zone counts by size, zones being 8-connected sets of equal level. There is
/// one column per size up to the largest zone.
pub fn glszm(d: &DiscretizedRoi) -> TextureMatrix {
    let ng = d.ng() as usize;
    let (w, h) = (d.width(), d.height());
    let mut zones = Vec::new();
    let mut seen = vec![false; w * h];
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        let a = d.levels()[start];
        if a == 0 || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut size = 0;
        while let Some(idx) = queue.pop_front() {
            size += 1;
            let (r, c) = ((idx / w) as isize, (idx % w) as isize);
            for (dr, dc) in NEIGHBORS {
                let (nr, nc) = (r + dr, c + dc);
                if d.level_at(nr, nc) == a {
                    let n = nr as usize * w + nc as usize;
                    if !seen[n] {
                        seen[n] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
        zones.push((a as usize, size));
    }
    let cols = zones.iter().map(|z| z.1).max().unwrap_or(1);
    let mut p = vec![0.0; ng * cols];
    for (a, size) in zones {
        p[(a - 1) * cols + size - 1] += 1.0;
    }
    TextureMatrix::new(MatrixKind::Glszm, ng, cols, vec![p], Vec::new(), d.n_pixels())
}

/// Dependence counts: for each ROI pixel, the number of 8-neighbors in the ROI
/// whose level differs by at most `alpha`, stored in column `count`
/// (dependence `count + 1`).
pub fn gldm(d: &DiscretizedRoi, alpha: u32) -> TextureMatrix {
    let ng = d.ng() as usize;
    let cols = NEIGHBORS.len() + 1;
    let mut p = vec![0.0; ng * cols];
    for r in 0..d.height() as isize {
        for c in 0..d.width() as isize {
            let a = d.level_at(r, c);
            if a == 0 {
                continue;
            }
            let count = NEIGHBORS
                .iter()
                .filter(|&&(dr, dc)| {
                    let b = d.level_at(r + dr, c + dc);
                    b != 0 && a.abs_diff(b) <= alpha
                })
                .count();
            p[(a as usize - 1) * cols + count] += 1.0;
        }
    }
    TextureMatrix::new(MatrixKind::Gldm, ng, cols, vec![p], Vec::new(), d.n_pixels())
}

/// SE, LE, GLN, GLNN, SN, SNN, Percentage, GLV, SV, Entropy, LGE, HGE,
/// SLGE, SHGE, LLGE, LHGE for one count layer (`i` = level, `j` = size).
fn size_features(p: &[f64], ng: usize, cols: usize, n_pixels: usize) -> Option<[f64; 16]> {
    let total: f64 = p.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let mut row_sums = vec![0.0; ng];
    let mut col_sums = vec![0.0; cols];
    let mut f = [0.0; 16];
    let (mut mu_i, mut mu_j) = (0.0, 0.0);
    for i in 0..ng {
        let fi = (i + 1) as f64;
        let i2 = fi * fi;
        for j in 0..cols {
            let v = p[i * cols + j];
            if v == 0.0 {
                continue;
            }
            let fj = (j + 1) as f64;
            let j2 = fj * fj;
            row_sums[i] += v;
            col_sums[j] += v;
            f[0] += v / j2;
            f[1] += v * j2;
            f[10] += v / i2;
            f[11] += v * i2;
            f[12] += v / (i2 * j2);
            f[13] += v * i2 / j2;
            f[14] += v * j2 / i2;
            f[15] += v * i2 * j2;
            let q = v / total;
            mu_i += q * fi;
            mu_j += q * fj;
            f[9] -= q * q.log2();
        }
    }
    for k in [0, 1, 10, 11, 12, 13, 14, 15] {
        f[k] /= total;
    }
    let gln: f64 = row_sums.iter().map(|s| s * s).sum();
    let sn: f64 = col_sums.iter().map(|s| s * s).sum();
    f[2] = gln / total;
    f[3] = gln / (total * total);
    f[4] = sn / total;
    f[5] = sn / (total * total);
    f[6] = total / n_pixels as f64;
    f[7] = row_sums
        .iter()
        .enumerate()
        .map(|(i, s)| s / total * ((i + 1) as f64 - mu_i).powi(2))
        .sum();
    f[8] = col_sums
        .iter()
        .enumerate()
        .map(|(j, s)| s / total * ((j + 1) as f64 - mu_j).powi(2))
        .sum();
    Some(f)
}

fn averaged(m: &TextureMatrix, expected: MatrixKind) -> Result<[f64; 16], RadiomicsError> {
    if m.kind() != expected {
        return Err(RadiomicsError::InvalidInput(format!(
            "expected a {expected}, got {}",
            m.kind()
        )));
    }
    let mut acc = [0.0; 16];
    let mut used = 0usize;
    for layer in 0..m.n_layers() {
        if let Some(f) = size_features(m.layer(layer), m.rows(), m.cols(), m.n_pixels()) {
            acc.iter_mut().zip(f).for_each(|(a, v)| *a += v);
            used += 1;
        }
    }
    if used == 0 {
        return Err(degenerate(format!("empty {expected}")));
    }
    acc.iter_mut().for_each(|a| *a /= used as f64);
    Ok(acc)
}

/// The 16 GLRLM features averaged over directions.
pub fn glrlm_features(m: &TextureMatrix) -> Result<[f64; 16], RadiomicsError> {
    averaged(m, MatrixKind::Glrlm)
}

pub fn glszm_features(m: &TextureMatrix) -> Result<[f64; 16], RadiomicsError> {
    averaged(m, MatrixKind::Glszm)
}

/// The 14 GLDM features (the size-matrix set without the two
/// normalized/percentage terms that are fixed by construction).
pub fn gldm_features(m: &TextureMatrix) -> Result<[f64; 14], RadiomicsError> {
    let f = averaged(m, MatrixKind::Gldm)?;
    let pick = [0, 1, 2, 4, 5, 7, 8, 9, 10, 11, 12, 13, 14, 15];
    Ok(pick.map(|k| f[k]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::names::{GLDM, GLRLM, GLSZM};

    fn pos(names: &[&str], name: &str) -> usize {
        names.iter().position(|n| *n == name).unwrap()
    }

    #[test]
    fn single_horizontal_run() {
        let d = DiscretizedRoi::from_levels(4, 1, vec![1; 4]).unwrap();
        let m = glrlm(&d);
        assert_eq!(m.layer(0), &[0.0, 0.0, 0.0, 1.0]);
        let f = glrlm_features(&m.select_layer(0)).unwrap();
        assert_eq!(f[pos(&GLRLM, "LongRunEmphasis")], 16.0);
        assert_eq!(f[pos(&GLRLM, "ShortRunEmphasis")], 1.0 / 16.0);
        assert_eq!(f[pos(&GLRLM, "RunPercentage")], 0.25);
        // the other three directions see four runs of length 1
        for layer in 1..4 {
            assert_eq!(m.layer(layer), &[4.0, 0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn constant_three_by_three() {
        let d = DiscretizedRoi::from_levels(3, 3, vec![1; 9]).unwrap();
        let m = glszm(&d);
        assert_eq!(m.cols(), 9);
        assert_eq!(m.layer(0)[8], 1.0);
        assert_eq!(m.total(0), 1.0);
        let f = glszm_features(&m).unwrap();
        assert_eq!(f[pos(&GLSZM, "LargeAreaEmphasis")], 81.0);
        assert_eq!(f[pos(&GLSZM, "ZonePercentage")], 1.0 / 9.0);
        assert_eq!(f[pos(&GLSZM, "ZoneEntropy")], 0.0);
        assert_eq!(f[pos(&GLSZM, "GrayLevelVariance")], 0.0);
    }

    #[test]
    fn diagonal_zones_join() {
        let d = DiscretizedRoi::from_levels(2, 2, vec![1, 2, 2, 1]).unwrap();
        let m = glszm(&d);
        assert_eq!(m.layer(0), &[0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn dependence_on_two_by_two_checker() {
        // every pixel matches exactly its diagonal neighbor, so each has
        // dependence 2 and SmallDependenceEmphasis = 1 / 2^2
        let d = DiscretizedRoi::from_levels(2, 2, vec![1, 2, 2, 1]).unwrap();
        let m = gldm(&d, 0);
        assert_eq!(m.get(0, 0, 1), 2.0);
        assert_eq!(m.get(0, 1, 1), 2.0);
        assert_eq!(m.total(0), 4.0);
        let f = gldm_features(&m).unwrap();
        assert_eq!(f[pos(&GLDM, "SmallDependenceEmphasis")], 0.25);
        assert_eq!(f[pos(&GLDM, "LargeDependenceEmphasis")], 4.0);
        assert_eq!(f[pos(&GLDM, "DependenceVariance")], 0.0);
        // alpha 1 makes all three neighbors dependent
        let f = gldm_features(&gldm(&d, 1)).unwrap();
        assert_eq!(f[pos(&GLDM, "SmallDependenceEmphasis")], 1.0 / 16.0);
    }

    #[test]
    fn hand_computed_size_features() {
        // horizontally: level 1 has one run of 2, level 2 one run of 1
        let d = DiscretizedRoi::from_levels(4, 1, vec![1, 1, 2, 0]).unwrap();
        let m = glrlm(&d).select_layer(0);
        assert_eq!(m.layer(0), &[0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let f = glrlm_features(&m).unwrap();
        // runs: (i=1, j=2), (i=2, j=1); Nr = 2, Np = 3
        assert_eq!(f[pos(&GLRLM, "ShortRunEmphasis")], (0.25 + 1.0) / 2.0);
        assert_eq!(f[pos(&GLRLM, "LongRunEmphasis")], (4.0 + 1.0) / 2.0);
        assert_eq!(f[pos(&GLRLM, "RunPercentage")], 2.0 / 3.0);
        assert_eq!(f[pos(&GLRLM, "GrayLevelNonUniformity")], 1.0);
        assert_eq!(f[pos(&GLRLM, "GrayLevelNonUniformityNormalized")], 0.5);
        assert_eq!(f[pos(&GLRLM, "GrayLevelVariance")], 0.25);
        assert_eq!(f[pos(&GLRLM, "RunVariance")], 0.25);
        assert_eq!(f[pos(&GLRLM, "RunEntropy")], 1.0);
        assert_eq!(f[pos(&GLRLM, "LowGrayLevelRunEmphasis")], (1.0 + 0.25) / 2.0);
        assert_eq!(f[pos(&GLRLM, "HighGrayLevelRunEmphasis")], (1.0 + 4.0) / 2.0);
        assert_eq!(f[pos(&GLRLM, "ShortRunLowGrayLevelEmphasis")], (0.25 + 0.25) / 2.0);
        assert_eq!(f[pos(&GLRLM, "ShortRunHighGrayLevelEmphasis")], (0.25 + 4.0) / 2.0);
        assert_eq!(f[pos(&GLRLM, "LongRunLowGrayLevelEmphasis")], (4.0 + 0.25) / 2.0);
        assert_eq!(f[pos(&GLRLM, "LongRunHighGrayLevelEmphasis")], (4.0 + 4.0) / 2.0);
    }
}

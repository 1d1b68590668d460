use crate::discretize::DiscretizedRoi;
use crate::error::{degenerate, RadiomicsError};
use crate::matrix::{MatrixKind, TextureMatrix};

/// Coarseness reported when every neighborhood difference is zero.
pub const NGTDM_COARSENESS_CAP: f64 = 1e6;

/// Per-level `n_i` (pixels with at least one ROI neighbor) and
/// `s_i = sum |i - mean of the 8-neighbors inside the ROI|`.
pub fn ngtdm(d: &DiscretizedRoi) -> TextureMatrix {
    let ng = d.ng() as usize;
    let mut m = vec![0.0; ng * 2];
    for r in 0..d.height() as isize {
        for c in 0..d.width() as isize {
            let a = d.level_at(r, c);
            if a == 0 {
                continue;
            }
            let (mut sum, mut count) = (0u32, 0u32);
            for dr in -1..=1 {
                for dc in -1..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let b = d.level_at(r + dr, c + dc);
                    if b > 0 {
                        sum += b;
                        count += 1;
                    }
                }
            }
            if count == 0 {
                continue;
            }
            let i = a as usize - 1;
            m[i * 2] += 1.0;
            m[i * 2 + 1] += (f64::from(a) - f64::from(sum) / f64::from(count)).abs();
        }
    }
    TextureMatrix::new(MatrixKind::Ngtdm, ng, 2, vec![m], Vec::new(), d.n_pixels())
}

/// Coarseness, Contrast, Busyness, Complexity, Strength.
pub fn ngtdm_features(m: &TextureMatrix) -> Result<[f64; 5], RadiomicsError> {
    if m.kind() != MatrixKind::Ngtdm {
        return Err(RadiomicsError::InvalidInput(format!(
            "expected an NGTDM, got {}",
            m.kind()
        )));
    }
    let nvp = m.total(0);
    if nvp <= 0.0 {
        return Err(degenerate("no ROI pixel has a neighbor inside the ROI"));
    }
    // (level, p_i, s_i) for levels that occur
    let lv: Vec<(f64, f64, f64)> = (0..m.rows())
        .filter(|&i| m.get(0, i, 0) > 0.0)
        .map(|i| ((i + 1) as f64, m.get(0, i, 0) / nvp, m.get(0, i, 1)))
        .collect();
    let ngp = lv.len() as f64;
    let ps: f64 = lv.iter().map(|&(_, p, s)| p * s).sum();
    let s_total: f64 = lv.iter().map(|&(_, _, s)| s).sum();

    let coarseness = if ps > 0.0 { 1.0 / ps } else { NGTDM_COARSENESS_CAP };
    let (mut contrast_sum, mut busy_den, mut complexity, mut strength_num) = (0.0, 0.0, 0.0, 0.0);
    for &(i, pi, si) in &lv {
        for &(j, pj, sj) in &lv {
            let d2 = (i - j) * (i - j);
            contrast_sum += pi * pj * d2;
            busy_den += (i * pi - j * pj).abs();
            complexity += (i - j).abs() * (pi * si + pj * sj) / (pi + pj);
            strength_num += (pi + pj) * d2;
        }
    }
    let contrast = if ngp > 1.0 {
        contrast_sum / (ngp * (ngp - 1.0)) * s_total / nvp
    } else {
        0.0
    };
    let busyness = if busy_den > 0.0 { ps / busy_den } else { 0.0 };
    let strength = if s_total > 0.0 { strength_num / s_total } else { 0.0 };
    Ok([coarseness, contrast, busyness, complexity / nvp, strength])
}

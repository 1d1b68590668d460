use nalgebra::{DMatrix, SymmetricEigen};

use crate::discretize::DiscretizedRoi;
use crate::error::{degenerate, RadiomicsError};
use crate::matrix::{MatrixKind, TextureMatrix};

/// Unit `(drow, dcol)` steps for 0, 45, 90 and 135 degrees.
pub const DIRECTIONS: [(isize, isize); 4] = [(0, 1), (-1, 1), (-1, 0), (-1, -1)];

fn check_distance(distance: usize) -> Result<isize, RadiomicsError> {
    if distance == 0 {
        return Err(RadiomicsError::InvalidInput("distance must be >= 1".into()));
    }
    Ok(distance as isize)
}

/// Symmetric co-occurrence counts, one layer per direction at `distance`.
pub fn glcm(d: &DiscretizedRoi, distance: usize) -> Result<TextureMatrix, RadiomicsError> {
    let dist = check_distance(distance)?;
    let ng = d.ng() as usize;
    let offsets: Vec<(isize, isize)> = DIRECTIONS.iter().map(|&(dr, dc)| (dr * dist, dc * dist)).collect();
    let mut layers = Vec::with_capacity(offsets.len());
    for &(dr, dc) in &offsets {
        let mut p = vec![0.0; ng * ng];
        for r in 0..d.height() {
            for c in 0..d.width() {
                let a = d.level(r, c);
                if a == 0 {
                    continue;
                }
                let b = d.level_at(r as isize + dr, c as isize + dc);
                if b == 0 {
                    continue;
                }
                let (a, b) = (a as usize - 1, b as usize - 1);
                p[a * ng + b] += 1.0;
                p[b * ng + a] += 1.0;
            }
        }
        layers.push(p);
    }
    Ok(TextureMatrix::new(
        MatrixKind::Glcm,
        ng,
        ng,
        layers,
        offsets,
        d.n_pixels(),
    ))
}

fn xlog2x(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

fn mcc(p: &[f64], px: &[f64], ng: usize) -> f64 {
    let active: Vec<usize> = (0..ng).filter(|&i| px[i] > 0.0).collect();
    let k = active.len();
    if k < 2 {
        return 1.0;
    }
    // D^{-1/2} P D^{-1} P D^{-1/2} shares its spectrum with the usual
    // Q = P D^{-1} P^T D^{-1} but is symmetric.
    let s = DMatrix::from_fn(k, k, |a, b| {
        let (ia, ib) = (active[a], active[b]);
        let mut acc = 0.0;
        for &ic in &active {
            acc += p[ia * ng + ic] * p[ib * ng + ic] / px[ic];
        }
        acc / (px[ia] * px[ib]).sqrt()
    });
    let mut eig: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    eig[1].max(0.0).sqrt()
}

fn layer_features(p: &[f64], ng: usize) -> [f64; 24] {
    let ngf = ng as f64;
    let mut px = vec![0.0; ng];
    for i in 0..ng {
        px[i] = p[i * ng..(i + 1) * ng].iter().sum();
    }
    // symmetric, so py == px
    let mu: f64 = (0..ng).map(|i| (i + 1) as f64 * px[i]).sum();
    let var: f64 = (0..ng).map(|i| ((i + 1) as f64 - mu).powi(2) * px[i]).sum();

    let mut p_sum = vec![0.0; 2 * ng + 1];
    let mut p_diff = vec![0.0; ng];
    let (mut autocorr, mut prominence, mut shade, mut tendency, mut contrast) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut energy, mut hxy, mut hxy1, mut hxy2, mut max_p) = (0.0, 0.0, 0.0, 0.0, 0.0f64);
    for i in 0..ng {
        let fi = (i + 1) as f64;
        for j in 0..ng {
            let fj = (j + 1) as f64;
            let pxy = px[i] * px[j];
            if pxy > 0.0 {
                hxy2 -= pxy * pxy.log2();
            }
            let v = p[i * ng + j];
            if v == 0.0 {
                continue;
            }
            p_sum[i + j + 2] += v;
            p_diff[i.abs_diff(j)] += v;
            autocorr += v * fi * fj;
            let t = fi + fj - 2.0 * mu;
            tendency += t * t * v;
            shade += t * t * t * v;
            prominence += t * t * t * t * v;
            contrast += (fi - fj).powi(2) * v;
            energy += v * v;
            hxy -= v * v.log2();
            hxy1 -= v * pxy.log2();
            max_p = max_p.max(v);
        }
    }

    let correlation = if var > 0.0 { (autocorr - mu * mu) / var } else { 1.0 };
    let hx: f64 = -px.iter().map(|&v| xlog2x(v)).sum::<f64>();
    let imc1 = if hx > 0.0 { (hxy - hxy1) / hx } else { 0.0 };
    let imc2 = if hxy2 > hxy {
        (1.0 - (-2.0 * (hxy2 - hxy)).exp()).sqrt()
    } else {
        0.0
    };

    let (mut diff_avg, mut diff_ent, mut idm, mut idmn, mut id, mut idn, mut inv_var) =
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, &v) in p_diff.iter().enumerate() {
        let fk = k as f64;
        diff_avg += fk * v;
        diff_ent -= xlog2x(v);
        idm += v / (1.0 + fk * fk);
        idmn += v / (1.0 + fk * fk / (ngf * ngf));
        id += v / (1.0 + fk);
        idn += v / (1.0 + fk / ngf);
        if k > 0 {
            inv_var += v / (fk * fk);
        }
    }
    let diff_var: f64 = p_diff
        .iter()
        .enumerate()
        .map(|(k, &v)| (k as f64 - diff_avg).powi(2) * v)
        .sum();
    let (mut sum_avg, mut sum_ent) = (0.0, 0.0);
    for (k, &v) in p_sum.iter().enumerate() {
        sum_avg += k as f64 * v;
        sum_ent -= xlog2x(v);
    }

    [
        autocorr,
        mu,
        prominence,
        shade,
        tendency,
        contrast,
        correlation,
        diff_avg,
        diff_ent,
        diff_var,
        energy,
        hxy,
        imc1,
        imc2,
        idm,
        idmn,
        id,
        idn,
        inv_var,
        max_p,
        sum_avg,
        sum_ent,
        var,
        mcc(p, &px, ng),
    ]
}

/// The 24 GLCM features, averaged over the directions that have at least one pair.
pub fn glcm_features(m: &TextureMatrix) -> Result<[f64; 24], RadiomicsError> {
    if m.kind() != MatrixKind::Glcm {
        return Err(RadiomicsError::InvalidInput(format!(
            "expected a GLCM, got {}",
            m.kind()
        )));
    }
    let mut acc = [0.0; 24];
    let mut used = 0usize;
    for layer in 0..m.n_layers() {
        let Some(p) = m.normalized(layer) else { continue };
        for (a, v) in acc.iter_mut().zip(layer_features(&p, m.rows())) {
            *a += v;
        }
        used += 1;
    }
    if used == 0 {
        return Err(degenerate("no neighboring ROI pixel pairs for the GLCM"));
    }
    acc.iter_mut().for_each(|a| *a /= used as f64);
    Ok(acc)
}

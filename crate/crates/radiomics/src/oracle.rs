//! Brute-force texture matrices built by enumerating pixel pairs, segments and
//! neighborhoods directly. Slow (quadratic in the ROI size) and meant only as a
//! test reference for the fast builders.

use crate::discretize::DiscretizedRoi;
use crate::glcm::DIRECTIONS;
use crate::matrix::{MatrixKind, TextureMatrix};

fn roi_pixels(d: &DiscretizedRoi) -> Vec<(isize, isize, u32)> {
    let mut out = Vec::new();
    for r in 0..d.height() {
        for c in 0..d.width() {
            let l = d.level(r, c);
            if l > 0 {
                out.push((r as isize, c as isize, l));
            }
        }
    }
    out
}

fn chebyshev_adjacent(a: (isize, isize), b: (isize, isize)) -> bool {
    a != b && (a.0 - b.0).abs() <= 1 && (a.1 - b.1).abs() <= 1
}

/// Every ordered pair of ROI pixels whose displacement is plus or minus the offset.
pub fn glcm(d: &DiscretizedRoi, distance: usize) -> TextureMatrix {
    let ng = d.ng() as usize;
    let px = roi_pixels(d);
    let dist = distance as isize;
    let offsets: Vec<(isize, isize)> = DIRECTIONS.iter().map(|&(a, b)| (a * dist, b * dist)).collect();
    let layers = offsets
        .iter()
        .map(|&(dr, dc)| {
            let mut m = vec![0.0; ng * ng];
            for &(r1, c1, a) in &px {
                for &(r2, c2, b) in &px {
                    let (er, ec) = (r2 - r1, c2 - c1);
                    if (er, ec) == (dr, dc) || (er, ec) == (-dr, -dc) {
                        m[(a as usize - 1) * ng + b as usize - 1] += 1.0;
                    }
                }
            }
            m
        })
        .collect();
    TextureMatrix::new(MatrixKind::Glcm, ng, ng, layers, offsets, d.n_pixels())
}

/// Every maximal straight segment of equal level along each direction.
pub fn glrlm(d: &DiscretizedRoi) -> TextureMatrix {
    let ng = d.ng() as usize;
    let cols = d.width().max(d.height());
    let px = roi_pixels(d);
    let layers = DIRECTIONS
        .iter()
        .map(|&(dr, dc)| {
            let mut m = vec![0.0; ng * cols];
            for &(r, c, a) in &px {
                for len in 1..=cols as isize {
                    let inside = (0..len).all(|k| d.level_at(r + k * dr, c + k * dc) == a);
                    if !inside {
                        break;
                    }
                    let maximal = d.level_at(r - dr, c - dc) != a && d.level_at(r + len * dr, c + len * dc) != a;
                    if maximal {
                        m[(a as usize - 1) * cols + len as usize - 1] += 1.0;
                    }
                }
            }
            m
        })
        .collect();
    TextureMatrix::new(MatrixKind::Glrlm, ng, cols, layers, DIRECTIONS.to_vec(), d.n_pixels())
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Zones from union-find over all Chebyshev-adjacent equal-level pixel pairs.
pub fn glszm(d: &DiscretizedRoi) -> TextureMatrix {
    let ng = d.ng() as usize;
    let px = roi_pixels(d);
    let mut parent: Vec<usize> = (0..px.len()).collect();
    for i in 0..px.len() {
        for j in 0..px.len() {
            let (a, b) = (px[i], px[j]);
            if a.2 == b.2 && chebyshev_adjacent((a.0, a.1), (b.0, b.1)) {
                let (ra, rb) = (find(&mut parent, i), find(&mut parent, j));
                parent[ra] = rb;
            }
        }
    }
    let mut sizes = vec![0usize; px.len()];
    for i in 0..px.len() {
        let root = find(&mut parent, i);
        sizes[root] += 1;
    }
    let cols = sizes.iter().copied().max().unwrap_or(1);
    let mut m = vec![0.0; ng * cols];
    for (i, &s) in sizes.iter().enumerate() {
        if s > 0 {
            m[(px[i].2 as usize - 1) * cols + s - 1] += 1.0;
        }
    }
    TextureMatrix::new(MatrixKind::Glszm, ng, cols, vec![m], Vec::new(), d.n_pixels())
}

/// Dependence counts by comparing every pixel with every other ROI pixel.
pub fn gldm(d: &DiscretizedRoi, alpha: u32) -> TextureMatrix {
    let ng = d.ng() as usize;
    let px = roi_pixels(d);
    let mut m = vec![0.0; ng * 9];
    for &(r1, c1, a) in &px {
        let count = px
            .iter()
            .filter(|&&(r2, c2, b)| chebyshev_adjacent((r1, c1), (r2, c2)) && a.abs_diff(b) <= alpha)
            .count();
        m[(a as usize - 1) * 9 + count] += 1.0;
    }
    TextureMatrix::new(MatrixKind::Gldm, ng, 9, vec![m], Vec::new(), d.n_pixels())
}

/// Neighborhood means by scanning all ROI pixels for each pixel (row-major).
pub fn ngtdm(d: &DiscretizedRoi) -> TextureMatrix {
    let ng = d.ng() as usize;
    let px = roi_pixels(d);
    let mut m = vec![0.0; ng * 2];
    for &(r1, c1, a) in &px {
        let neighbors: Vec<u32> = px
            .iter()
            .filter(|&&(r2, c2, _)| chebyshev_adjacent((r1, c1), (r2, c2)))
            .map(|p| p.2)
            .collect();
        if neighbors.is_empty() {
            continue;
        }
        let mean = f64::from(neighbors.iter().sum::<u32>()) / neighbors.len() as f64;
        let i = a as usize - 1;
        m[i * 2] += 1.0;
        m[i * 2 + 1] += (f64::from(a) - mean).abs();
    }
    TextureMatrix::new(MatrixKind::Ngtdm, ng, 2, vec![m], Vec::new(), d.n_pixels())
}

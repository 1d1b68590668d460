use proptest::prelude::*;
use texharm_core::{GrayImage, RoiMask};
use texharm_radiomics::{
    discretize, extract_all, glcm, gldm, glrlm, glszm, ngtdm, DiscretizedRoi, Family, TextureMatrix,
};

fn case_strategy() -> impl Strategy<Value = (usize, usize, Vec<u8>, Vec<bool>)> {
    (4usize..14, 4usize..14).prop_flat_map(|(w, h)| {
        (
            Just(w),
            Just(h),
            prop::collection::vec(any::<u8>(), w * h),
            prop::collection::vec(prop::bool::weighted(0.8), w * h),
        )
    })
}

fn build(w: usize, h: usize, px: &[u8], m: &[bool]) -> Option<(GrayImage, RoiMask)> {
    let img = GrayImage::from_u8(w, h, px).unwrap();
    let mask = RoiMask::new(w, h, m.to_vec()).unwrap();
    texharm_core::validate_pair(&img, &mask).ok()?;
    Some((img, mask))
}

fn rotate_image(img: &GrayImage) -> GrayImage {
    // 90 degrees clockwise: new (r, c) = old (H - 1 - c, r)
    let (w, h) = (img.width(), img.height());
    GrayImage::from_fn(h, w, |r, c| img.get(h - 1 - c, r)).unwrap()
}

fn rotate_mask(mask: &RoiMask) -> RoiMask {
    let (w, h) = (mask.width(), mask.height());
    RoiMask::from_fn(h, w, |r, c| mask.get(h - 1 - c, r)).unwrap()
}

fn mass_ok(m: &TextureMatrix) {
    for layer in 0..m.n_layers() {
        if let Some(p) = m.normalized(layer) {
            let s: f64 = p.iter().sum();
            assert!((s - 1.0).abs() <= 1e-12, "{} layer {layer} sums to {s}", m.kind());
            assert!(p.iter().all(|&v| v >= 0.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gray_level_shift((w, h, px, m) in case_strategy(), k in 1u8..8) {
        let Some((img, mask)) = build(w, h, &px, &m) else { return Ok(()) };
        let shift = 5.0 * f64::from(k);
        let shifted = img.map(|v| v + shift).unwrap();
        let (Ok(a), Ok(b)) = (extract_all(&img, &mask, 5.0), extract_all(&shifted, &mask, 5.0)) else {
            return Ok(());
        };
        for f in &Family::ALL[1..] {
            prop_assert_eq!(a.family(*f), b.family(*f));
        }
        for name in ["Mean", "Median", "Minimum", "Maximum"] {
            let key = format!("firstorder_{name}");
            let (x, y) = (a.get(&key).unwrap(), b.get(&key).unwrap());
            prop_assert!((y - x - shift).abs() < 1e-9, "{} {} -> {}", name, x, y);
        }
    }

    #[test]
    fn rotation_coherence((w, h, px, m) in case_strategy()) {
        let Some((img, mask)) = build(w, h, &px, &m) else { return Ok(()) };
        let (Ok(a), Ok(b)) = (
            extract_all(&img, &mask, 5.0),
            extract_all(&rotate_image(&img), &rotate_mask(&mask), 5.0),
        ) else {
            return Ok(());
        };
        for f in [Family::Glcm, Family::Glrlm] {
            for (x, y) in a.family(f).iter().zip(b.family(f)) {
                prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{:?}: {} vs {}", f, x, y);
            }
        }
    }

    #[test]
    fn matrix_mass((w, h, px, m) in case_strategy()) {
        let Some((img, mask)) = build(w, h, &px, &m) else { return Ok(()) };
        let d = discretize(&img, &mask, 5.0).unwrap();
        mass_ok(&glcm(&d, 1).unwrap());
        mass_ok(&glrlm(&d));
        mass_ok(&glszm(&d));
        mass_ok(&gldm(&d, 0));
        mass_ok(&ngtdm(&d));
        // GLCM layers are symmetric
        let g = glcm(&d, 1).unwrap();
        let ng = g.rows();
        for layer in 0..g.n_layers() {
            for i in 0..ng {
                for j in 0..ng {
                    prop_assert_eq!(g.get(layer, i, j), g.get(layer, j, i));
                }
            }
        }
    }

    #[test]
    fn levels_in_range((w, h, px, m) in case_strategy(), bw in 0.5f64..20.0) {
        let Some((img, mask)) = build(w, h, &px, &m) else { return Ok(()) };
        let d = discretize(&img, &mask, bw).unwrap();
        let vals = d.roi_values();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let expect = ((hi / bw).floor() - (lo / bw).floor()) as u32 + 1;
        prop_assert_eq!(d.ng(), expect);
        prop_assert!(d.levels().iter().all(|&l| l <= d.ng()));
        prop_assert_eq!(d.levels().iter().filter(|&&l| l > 0).count(), mask.count());
    }
}

#[test]
fn dependence_example_uses_diagonals() {
    let d = DiscretizedRoi::from_levels(2, 2, vec![1, 2, 2, 1]).unwrap();
    let m = gldm(&d, 0);
    // no pixel has zero dependent neighbors: each matches its diagonal
    assert_eq!(m.get(0, 0, 0) + m.get(0, 1, 0), 0.0);
    assert_eq!(m.get(0, 0, 1) + m.get(0, 1, 1), 4.0);
}

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use texharm_core::{FilterBank, GrayImage};
use texharm_imaging::{apply_filter_bank, convolve2d, generate_synthetic_bank, FilterApplicationConfig, SyntheticKind};

/// Direct evaluation of the padded cross-correlation, one output pixel at a time.
fn naive_correlate(img: &GrayImage, kernel: &[f64], k: usize, bias: f64, p: usize) -> Vec<f64> {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let mut out = Vec::new();
    for i in 0..h {
        for j in 0..w {
            let mut acc = 0.0;
            for u in 0..k as isize {
                for v in 0..k as isize {
                    let (r, c) = (i + u - p as isize, j + v - p as isize);
                    let x = if r >= 0 && r < h && c >= 0 && c < w {
                        img.get(r as usize, c as usize)
                    } else {
                        0.0
                    };
                    acc += kernel[(u * k as isize + v) as usize] * x;
                }
            }
            out.push(acc + bias);
        }
    }
    out
}

fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GrayImage {
    let data: Vec<f64> = (0..w * h).map(|_| rng.random_range(0.0..255.0)).collect();
    GrayImage::new(w, h, data).unwrap()
}

#[test]
fn convolve2d_matches_naive_loop_on_random_inputs() {
    let cfg = FilterApplicationConfig::default();
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let img = {
            let data: Vec<f64> = (0..256).map(|_| rng.random_range(0.0..255.0)).collect();
            GrayImage::new(16, 16, data).unwrap()
        };
        let kernel: Vec<f64> = (0..16).map(|_| rng.random_range(-1.0..1.0)).collect();
        let bias = rng.random_range(-5.0..5.0);
        let got = convolve2d(&img, &kernel, bias, &cfg).unwrap();
        let want = naive_correlate(&img, &kernel, 4, bias, 1);
        assert_eq!((got.width(), got.height()), (16, 16));
        for (g, w) in got.data().iter().zip(&want) {
            assert!((g - w).abs() < 1e-9, "seed {seed}: {g} vs {w}");
        }
    }
}

#[test]
fn bank_average_equals_mean_of_single_outputs_exactly() {
    let cfg = FilterApplicationConfig::default();
    let bank = generate_synthetic_bank(SyntheticKind::GaussianRandom, 9, 4, 11).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let img = random_image(&mut rng, 23, 17);
    let got = apply_filter_bank(&img, &bank, &cfg).unwrap();
    let singles: Vec<GrayImage> = (0..bank.num_filters())
        .map(|n| {
            let k: Vec<f64> = bank.kernel(n).iter().map(|&w| f64::from(w)).collect();
            convolve2d(&img, &k, f64::from(bank.bias(n)), &cfg).unwrap()
        })
        .collect();
    for idx in 0..img.data().len() {
        let mut sum = 0.0;
        for s in &singles {
            sum += s.data()[idx];
        }
        assert_eq!(got.data()[idx], sum / singles.len() as f64);
    }
}

#[test]
fn identical_kernels_match_single_convolution() {
    let cfg = FilterApplicationConfig::default();
    let k: Vec<f32> = (0..16).map(|i| ((i * 7) % 5) as f32 / 8.0).collect();
    let bank = FilterBank::new(128, 4, k.repeat(128), vec![0.5; 128], "same").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let img = random_image(&mut rng, 20, 20);
    let single = convolve2d(&img, &k.iter().map(|&w| f64::from(w)).collect::<Vec<_>>(), 0.5, &cfg).unwrap();
    let avg = apply_filter_bank(&img, &bank, &cfg).unwrap();
    for (a, s) in avg.data().iter().zip(single.data()) {
        assert!((a - s).abs() < 1e-9 * s.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn default_config_preserves_shape(w in 1usize..40, h in 1usize..40, seed in any::<u64>()) {
        let bank = generate_synthetic_bank(SyntheticKind::DifferenceOfGaussians, 3, 4, seed).unwrap();
        let img = GrayImage::filled(w, h, 3.0).unwrap();
        let out = apply_filter_bank(&img, &bank, &FilterApplicationConfig::default()).unwrap();
        prop_assert_eq!((out.width(), out.height()), (w, h));
    }

    #[test]
    fn bank_is_linear_without_bias(
        seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights: Vec<f32> = (0..4 * 16).map(|_| rng.random_range(-1.0f32..1.0)).collect();
        let bank = FilterBank::new(4, 4, weights, vec![0.0; 4], "lin").unwrap();
        let x = random_image(&mut rng, 12, 9);
        let y = random_image(&mut rng, 12, 9);
        let combo = GrayImage::new(12, 9, x.data().iter().zip(y.data()).map(|(p, q)| a * p + b * q).collect()).unwrap();
        let cfg = FilterApplicationConfig::default();
        let fx = apply_filter_bank(&x, &bank, &cfg).unwrap();
        let fy = apply_filter_bank(&y, &bank, &cfg).unwrap();
        let fc = apply_filter_bank(&combo, &bank, &cfg).unwrap();
        for i in 0..fc.data().len() {
            let want = a * fx.data()[i] + b * fy.data()[i];
            prop_assert!((fc.data()[i] - want).abs() < 1e-9, "{} vs {}", fc.data()[i], want);
        }
    }
}

use texharm_core::stats::{percentile_sorted, sorted_copy};

use crate::discretize::DiscretizedRoi;

/// The 18 first-order features in canonical order.
///
/// Energy, TotalEnergy, Entropy and Uniformity are taken over the discretized
/// levels; everything else over the raw ROI intensities. Moments are population
/// moments and Kurtosis is not excess kurtosis.
pub fn first_order(d: &DiscretizedRoi) -> [f64; 18] {
    let x = d.roi_values();
    let n = x.len() as f64;
    let sorted = sorted_copy(x);

    let energy: f64 = d
        .levels()
        .iter()
        .filter(|&&l| l > 0)
        .map(|&l| f64::from(l).powi(2))
        .sum();
    let (mut entropy, mut uniformity) = (0.0, 0.0);
    for c in d.level_counts() {
        if c > 0 {
            let p = c as f64 / n;
            entropy -= p * p.log2();
            uniformity += p * p;
        }
    }

    let min = sorted[0];
    let max = sorted[sorted.len() - 1];
    let p10 = percentile_sorted(&sorted, 10.0);
    let p90 = percentile_sorted(&sorted, 90.0);
    let median = percentile_sorted(&sorted, 50.0);
    let iqr = percentile_sorted(&sorted, 75.0) - percentile_sorted(&sorted, 25.0);

    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4, mut mad) = (0.0, 0.0, 0.0, 0.0);
    for &v in x {
        let dv = v - mean;
        mad += dv.abs();
        m2 += dv * dv;
        m3 += dv * dv * dv;
        m4 += dv * dv * dv * dv;
    }
    let (m2, m3, m4, mad) = (m2 / n, m3 / n, m4 / n, mad / n);
    let (skewness, kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2))
    } else {
        (0.0, 0.0)
    };

    let robust: Vec<f64> = x.iter().copied().filter(|&v| v >= p10 && v <= p90).collect();
    let robust_mad = if robust.is_empty() {
        0.0
    } else {
        let rm = robust.iter().sum::<f64>() / robust.len() as f64;
        robust.iter().map(|v| (v - rm).abs()).sum::<f64>() / robust.len() as f64
    };
    let rms = (x.iter().map(|v| v * v).sum::<f64>() / n).sqrt();

    [
        energy,
        energy,
        entropy,
        min,
        p10,
        p90,
        max,
        mean,
        median,
        iqr,
        max - min,
        mad,
        robust_mad,
        rms,
        skewness,
        kurtosis,
        m2,
        uniformity,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::discretize;
    use crate::names::FIRST_ORDER;
    use texharm_core::{GrayImage, RoiMask};

    fn features(values: &[f64]) -> impl Fn(&str) -> f64 {
        let img = GrayImage::new(values.len(), 1, values.to_vec()).unwrap();
        let d = discretize(&img, &RoiMask::full(values.len(), 1).unwrap(), 5.0).unwrap();
        let f = first_order(&d);
        move |name| f[FIRST_ORDER.iter().position(|n| *n == name).unwrap()]
    }

    #[test]
    fn constant_roi() {
        let f = features(&[5.0; 4]);
        assert_eq!(f("Mean"), 5.0);
        assert_eq!(f("Variance"), 0.0);
        assert_eq!(f("Range"), 0.0);
        assert_eq!(f("Entropy"), 0.0);
        assert_eq!(f("Uniformity"), 1.0);
        assert_eq!(f("Skewness"), 0.0);
        assert_eq!(f("Kurtosis"), 0.0);
    }

    #[test]
    fn two_points() {
        let f = features(&[0.0, 10.0]);
        assert_eq!(f("Mean"), 5.0);
        assert_eq!(f("Range"), 10.0);
        assert_eq!(f("Minimum"), 0.0);
        assert_eq!(f("Maximum"), 10.0);
        // levels 1 and 3
        assert_eq!(f("Energy"), 10.0);
        assert_eq!(f("Entropy"), 1.0);
        assert_eq!(f("Uniformity"), 0.5);
        assert_eq!(f("MeanAbsoluteDeviation"), 5.0);
        assert_eq!(f("RootMeanSquared"), 50f64.sqrt());
    }

    #[test]
    fn symmetric_sample() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        let f = features(&v);
        assert!(f("Skewness").abs() < 1e-9);
        assert_eq!(f("Median"), 50.5);
        assert!((f("10Percentile") - 10.9).abs() < 1e-12);
        assert!((f("90Percentile") - 90.1).abs() < 1e-12);
        assert!((f("InterquartileRange") - 49.5).abs() < 1e-12);
        // population variance of 1..=100 is (100^2 - 1) / 12
        assert!((f("Variance") - 833.25).abs() < 1e-9);
        let m2 = 833.25;
        let m4 = v.iter().map(|x| (x - 50.5f64).powi(4)).sum::<f64>() / 100.0;
        assert!((f("Kurtosis") - m4 / (m2 * m2)).abs() < 1e-12);
        // values 11..=90 kept, mean 50.5, mean |x - 50.5| = 20
        assert!((f("RobustMeanAbsoluteDeviation") - 20.0).abs() < 1e-12);
    }
}

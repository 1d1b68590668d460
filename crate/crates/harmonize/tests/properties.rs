use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use texharm_core::{FeatureRow, FeatureTable};
use texharm_harmonize::{
    combat_adjust, divergence_report, divergence_report_with, paper_jsd, strict_jsd, DiscreteDistribution, Metric,
    ReportOptions,
};

fn normalize(raw: Vec<f64>) -> DiscreteDistribution {
    let total: f64 = raw.iter().sum();
    DiscreteDistribution::from_probs(raw.iter().map(|v| v / total).collect()).unwrap()
}

fn make_table(cohort: &str, cols: &[Vec<f64>]) -> FeatureTable {
    let names = (0..cols.len()).map(|j| format!("f{j}")).collect();
    let rows = (0..cols[0].len())
        .map(|i| FeatureRow {
            case_id: format!("{cohort}-{i:04}"),
            cohort: cohort.into(),
            class_label: None,
            phase: None,
            values: cols.iter().map(|c| c[i]).collect(),
        })
        .collect();
    FeatureTable::new(names, rows).unwrap()
}

fn gaussian_cols(rng: &mut ChaCha8Rng, n: usize, shifts: &[f64]) -> Vec<Vec<f64>> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    shifts
        .iter()
        .map(|s| (0..n).map(|_| normal.sample(rng) + s).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn paper_jsd_symmetric_nonnegative(
        p in prop::collection::vec(0.0f64..1.0, 15),
        q in prop::collection::vec(0.0f64..1.0, 15),
    ) {
        prop_assume!(p.iter().sum::<f64>() > 0.0 && q.iter().sum::<f64>() > 0.0);
        let (p, q) = (normalize(p), normalize(q));
        let pq = paper_jsd(&p, &q).unwrap();
        prop_assert_eq!(pq, paper_jsd(&q, &p).unwrap());
        prop_assert!(pq >= 0.0);
        prop_assert_eq!(paper_jsd(&p, &p).unwrap(), 0.0);
        let s = strict_jsd(&p, &q).unwrap();
        prop_assert!(s >= 0.0 && s <= 2f64.ln() + 1e-12);
        prop_assert!((s - strict_jsd(&q, &p).unwrap()).abs() < 1e-15);
    }
}

#[test]
fn shifted_feature_scores_higher() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let same_a = make_table("A", &gaussian_cols(&mut rng, 500, &[0.0, 0.0, 0.0]));
    let same_b = make_table("B", &gaussian_cols(&mut rng, 500, &[0.0, 0.0, 0.0]));
    let shifted_b = make_table("B", &gaussian_cols(&mut rng, 500, &[3.0, 0.0, 0.0]));
    let same = divergence_report(&same_a, &same_b, 15).unwrap();
    let shifted = divergence_report(&same_a, &shifted_b, 15).unwrap();
    assert!(same.mean < shifted.mean, "{} vs {}", same.mean, shifted.mean);
    assert!(same.is_consistent() && shifted.is_consistent());
    assert_eq!((same.cohort_a.as_str(), same.cohort_b.as_str()), ("A", "B"));
}

#[test]
fn report_ignores_row_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = make_table("A", &gaussian_cols(&mut rng, 120, &[0.0, 1.0]));
    let b = make_table("B", &gaussian_cols(&mut rng, 90, &[0.5, 0.0]));
    let base = divergence_report(&a, &b, 15).unwrap();
    for _ in 0..5 {
        let mut ia: Vec<usize> = (0..a.n_rows()).collect();
        let mut ib: Vec<usize> = (0..b.n_rows()).collect();
        ia.shuffle(&mut rng);
        ib.shuffle(&mut rng);
        let r = divergence_report(&a.subset_rows(&ia), &b.subset_rows(&ib), 15).unwrap();
        assert_eq!(r, base);
    }
    let strict = divergence_report_with(
        &a,
        &b,
        &ReportOptions {
            metric: Metric::StrictJsd,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(strict.metric, "strict_jsd");
    assert!(strict.mean <= 2f64.ln());
}

fn two_batch_table(a: &[Vec<f64>], b: &[Vec<f64>]) -> FeatureTable {
    make_table("A", a).concat(&make_table("B", b)).unwrap()
}

fn batch_moments(t: &FeatureTable, batch: &str, j: usize) -> (f64, f64) {
    let v: Vec<f64> = t
        .rows()
        .iter()
        .filter(|r| r.cohort == batch)
        .map(|r| r.values[j])
        .collect();
    (texharm_core::stats::mean(&v), texharm_core::stats::std_dev(&v))
}

#[test]
fn combat_single_batch_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t = make_table("A", &gaussian_cols(&mut rng, 50, &[0.0, 4.0]));
    let out = combat_adjust(&t).unwrap();
    for (x, y) in t.rows().iter().zip(out.rows()) {
        for (a, b) in x.values.iter().zip(&y.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn combat_removes_location_shift() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = gaussian_cols(&mut rng, 80, &[0.0, 2.0, -1.0]);
    let b: Vec<Vec<f64>> = a.iter().map(|c| c.iter().map(|v| v + 10.0).collect()).collect();
    let out = combat_adjust(&two_batch_table(&a, &b)).unwrap();
    for j in 0..3 {
        let (ma, _) = batch_moments(&out, "A", j);
        let (mb, _) = batch_moments(&out, "B", j);
        assert!((ma - mb).abs() < 1e-9, "feature {j}: {ma} vs {mb}");
    }
}

#[test]
fn combat_equalizes_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = gaussian_cols(&mut rng, 200, &[5.0]);
    let b: Vec<Vec<f64>> = gaussian_cols(&mut rng, 200, &[0.0])
        .into_iter()
        .map(|c| c.into_iter().map(|v| 5.0 + 3.0 * v).collect())
        .collect();
    let out = combat_adjust(&two_batch_table(&a, &b)).unwrap();
    let (_, sa) = batch_moments(&out, "A", 0);
    let (_, sb) = batch_moments(&out, "B", 0);
    assert!((sa - sb).abs() / sa.max(sb) < 0.05, "{sa} vs {sb}");
}

#[test]
fn combat_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = gaussian_cols(&mut rng, 60, &[0.0, 1.0, 50.0]);
    let b: Vec<Vec<f64>> = gaussian_cols(&mut rng, 45, &[3.0, -2.0, 20.0])
        .into_iter()
        .map(|c| c.into_iter().map(|v| 2.0 * v).collect())
        .collect();
    let once = combat_adjust(&two_batch_table(&a, &b)).unwrap();
    let twice = combat_adjust(&once).unwrap();
    for (x, y) in once.rows().iter().zip(twice.rows()) {
        for (u, v) in x.values.iter().zip(&y.values) {
            assert!((u - v).abs() < 1e-9, "{u} vs {v}");
        }
    }
}

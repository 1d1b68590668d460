use proptest::prelude::*;
use texharm_core::{FeatureRow, FeatureTable};
use texharm_mlpipe::{split, split_indices, MlError};

fn labelled(n_neg: usize, n_pos: usize) -> FeatureTable {
    let rows = (0..n_neg + n_pos)
        .map(|i| FeatureRow {
            case_id: format!("case{i:04}"),
            cohort: "A".into(),
            class_label: Some(u8::from(i >= n_neg)),
            phase: None,
            values: vec![i as f64],
        })
        .collect();
    FeatureTable::new(vec!["x".into()], rows).unwrap()
}

fn class_sizes(t: &FeatureTable) -> (usize, usize) {
    let y = t.labels().unwrap();
    let pos = y.iter().filter(|&&l| l == 1).count();
    (y.len() - pos, pos)
}

#[test]
fn balanced_hundred() {
    let (train, test) = split(&labelled(50, 50), 0.8, 1).unwrap();
    assert_eq!(class_sizes(&train), (40, 40));
    assert_eq!(class_sizes(&test), (10, 10));
}

#[test]
fn cohort_of_482() {
    let (train, test) = split(&labelled(271, 211), 0.8, 1).unwrap();
    assert_eq!((train.n_rows(), test.n_rows()), (385, 97));
}

#[test]
fn seed_controls_split() {
    let t = labelled(50, 50);
    let a = split(&t, 0.8, 5).unwrap();
    let b = split(&t, 0.8, 5).unwrap();
    assert_eq!(a, b);
    let c = split(&t, 0.8, 6).unwrap();
    assert_ne!(a.1, c.1);
}

#[test]
fn needs_both_classes() {
    assert!(matches!(
        split(&labelled(0, 20), 0.8, 0),
        Err(MlError::SingleClass { .. })
    ));
}

proptest! {
    #[test]
    fn stratified_partition(n_neg in 1usize..300, n_pos in 1usize..300, seed in any::<u64>()) {
        let labels: Vec<u8> = (0..n_neg + n_pos).map(|i| u8::from(i >= n_neg)).collect();
        let (train, test) = split_indices(&labels, 0.8, seed).unwrap();
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
        for (class, size) in [(0u8, n_neg), (1, n_pos)] {
            let k = test.iter().filter(|&&i| labels[i] == class).count() as f64;
            prop_assert!((k - 0.2 * size as f64).abs() <= 1.0);
        }
        prop_assert_eq!(split_indices(&labels, 0.8, seed).unwrap(), (train, test));
    }
}

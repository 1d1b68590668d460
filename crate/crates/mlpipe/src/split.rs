use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use texharm_core::FeatureTable;

use crate::error::{class_counts, MlError};

pub const DEFAULT_TRAIN_RATIO: f64 = 0.8;

/// Number of test rows per class. The total is `ceil((1 - ratio) * n)`,
/// shared between classes by largest remainder so each class stays within
/// one row of its exact share.
fn test_quota(class_sizes: [usize; 2], ratio: f64) -> [usize; 2] {
    let frac = 1.0 - ratio;
    let n: usize = class_sizes.iter().sum();
    let total = ((frac * n as f64) - 1e-9).ceil().max(0.0) as usize;
    let exact = class_sizes.map(|c| frac * c as f64);
    let mut quota = exact.map(|e| (e + 1e-9).floor() as usize);
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| (exact[b] - quota[b] as f64).total_cmp(&(exact[a] - quota[a] as f64)));
    let mut left = total.saturating_sub(quota[0] + quota[1]);
    for &c in order.iter().cycle().take(4) {
        if left == 0 {
            break;
        }
        if quota[c] < class_sizes[c] {
            quota[c] += 1;
            left -= 1;
        }
    }
    quota
}

/// Stratified train/test row indices (each list sorted ascending).
pub fn split_indices(labels: &[u8], ratio: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>), MlError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(MlError::InvalidParams(format!("train ratio {ratio} must be in (0, 1)")));
    }
    let (negatives, positives) = class_counts(labels)?;
    let quota = test_quota([negatives, positives], ratio);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for class in 0..2u8 {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        let k = quota[class as usize];
        test.extend_from_slice(&idx[..k]);
        train.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Splits `table` by its class labels into `(train, test)`.
pub fn split(table: &FeatureTable, ratio: f64, seed: u64) -> Result<(FeatureTable, FeatureTable), MlError> {
    let labels = table.labels()?;
    let (train, test) = split_indices(&labels, ratio, seed)?;
    Ok((table.subset_rows(&train), table.subset_rows(&test)))
}

use rand::seq::SliceRandom;

use super::rng_stream;
use crate::error::{Error, Result};

fn class_indices(y: &[u8]) -> [Vec<usize>; 2] {
    let mut by_class = [Vec::new(), Vec::new()];
    for (i, &t) in y.iter().enumerate() {
        by_class[(t == 1) as usize].push(i);
    }
    by_class
}

/// Stratified train/test split. Each class contributes
/// `round(test_fraction * n_class)` rows to the test side, clamped so both
/// sides keep at least one row of every class. Returns sorted row indices.
pub fn stratified_split(y: &[u8], test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!("test fraction must be in (0, 1), got {test_fraction}")));
    }
    let mut rng = rng_stream(seed, 0);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (class, mut idx) in class_indices(y).into_iter().enumerate() {
        if idx.len() < 2 {
            return Err(Error::DegenerateClass { class: class as u8, count: idx.len() });
        }
        idx.shuffle(&mut rng);
        let n_test = ((test_fraction * idx.len() as f64).round() as usize).clamp(1, idx.len() - 1);
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Test-row indices for `k` stratified folds. Rows of each class are
/// shuffled and dealt round-robin, the dealing position carrying over from
/// one class to the next so total fold sizes differ by at most one.
pub fn stratified_folds(y: &[u8], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 folds, got {k}")));
    }
    let mut rng = rng_stream(seed, 1);
    let mut folds = vec![Vec::new(); k];
    let mut pos = 0;
    for mut idx in class_indices(y) {
        if idx.len() < k {
            return Err(Error::DegenerateFold { fold: idx.len() });
        }
        idx.shuffle(&mut rng);
        for i in idx {
            folds[pos % k].push(i);
            pos += 1;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_preserves_ratio() {
        let y: Vec<u8> = (0..1000).map(|i| (i % 20 == 0) as u8).collect();
        let (train, test) = stratified_split(&y, 0.2, 7).unwrap();
        assert_eq!(train.len() + test.len(), 1000);
        let pos_test = test.iter().filter(|&&i| y[i] == 1).count();
        assert_eq!(pos_test, 10);
        assert_eq!(test.len(), 200);
        let (t2, s2) = stratified_split(&y, 0.2, 7).unwrap();
        assert_eq!((t2, s2), (train, test));
    }

    #[test]
    fn split_needs_two_per_class() {
        assert!(matches!(stratified_split(&[1, 0, 0, 0], 0.5, 1), Err(Error::DegenerateClass { class: 1, count: 1 })));
    }

    #[test]
    fn folds_partition_rows() {
        let y: Vec<u8> = (0..103).map(|i| (i % 7 == 0) as u8).collect();
        let folds = stratified_folds(&y, 5, 3).unwrap();
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..103).collect::<Vec<_>>());
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        for f in &folds {
            let p = f.iter().filter(|&&i| y[i] == 1).count();
            assert!((3..=4).contains(&p));
        }
    }

    #[test]
    fn folds_reject_tiny_class() {
        let y = [1u8, 1, 0, 0, 0, 0, 0, 0, 0, 0];
        assert!(matches!(stratified_folds(&y, 5, 0), Err(Error::DegenerateFold { .. })));
    }
}

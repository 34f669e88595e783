//! External clustering indices and feature-recovery scoring.

use std::collections::HashMap;

use crate::error::{MwkError, Result};

/// Cross-tabulation of predicted clusters (rows) against true classes (columns).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<u64>>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub n: u64,
}

fn dense_ids(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = HashMap::new();
    let ids = labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect();
    (ids, map.len())
}

impl ContingencyTable {
    pub fn new(labels_pred: &[usize], labels_true: &[usize]) -> Result<Self> {
        if labels_pred.len() != labels_true.len() {
            return Err(MwkError::DimensionMismatch { expected: labels_true.len(), got: labels_pred.len() });
        }
        let (pred, rows) = dense_ids(labels_pred);
        let (truth, cols) = dense_ids(labels_true);
        let mut counts = vec![vec![0u64; cols]; rows];
        for (&a, &b) in pred.iter().zip(&truth) {
            counts[a][b] += 1;
        }
        let row_sums = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums = (0..cols).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        Ok(ContingencyTable { counts, row_sums, col_sums, n: labels_true.len() as u64 })
    }
}

fn choose2(x: u64) -> i128 {
    let x = x as i128;
    x * (x - 1) / 2
}

/// Hubert–Arabie adjusted Rand index.
///
/// Pair counts are kept as integers and the index is formed with a single
/// division, `(2N·I − 2AB) / (N(A + B) − 2AB)` with `N = C(n, 2)`.
/// When that denominator vanishes (both partitions trivial) the index is 1
/// if the partitions coincide up to relabeling and 0 otherwise.
pub fn ari(labels_true: &[usize], labels_pred: &[usize]) -> Result<f64> {
    if labels_true.len() < 2 {
        return Err(MwkError::input("ARI needs at least two points"));
    }
    let t = ContingencyTable::new(labels_pred, labels_true)?;
    let index: i128 = t.counts.iter().flatten().map(|&c| choose2(c)).sum();
    let a: i128 = t.row_sums.iter().map(|&c| choose2(c)).sum();
    let b: i128 = t.col_sums.iter().map(|&c| choose2(c)).sum();
    let pairs = choose2(t.n);
    let num = 2 * pairs * index - 2 * a * b;
    let denom = pairs * (a + b) - 2 * a * b;
    if denom == 0 {
        let identical = t.counts.iter().all(|r| r.iter().filter(|&&c| c > 0).count() <= 1)
            && t.row_sums.len() == t.col_sums.len();
        return Ok(if identical { 1.0 } else { 0.0 });
    }
    Ok(num as f64 / denom as f64)
}

/// Size-weighted mean over clusters of the base-2 entropy of true classes
/// inside each cluster. Zero means every cluster is pure.
pub fn cluster_entropy(labels_pred: &[usize], labels_true: &[usize]) -> Result<f64> {
    if labels_pred.is_empty() {
        return Err(MwkError::input("entropy of an empty partition"));
    }
    let t = ContingencyTable::new(labels_pred, labels_true)?;
    let n = t.n as f64;
    Ok(t.counts
        .iter()
        .zip(&t.row_sums)
        .map(|(row, &size)| {
            let size = size as f64;
            let h: f64 = row
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| {
                    let q = c as f64 / size;
                    -q * q.log2()
                })
                .sum();
            size / n * h
        })
        .sum())
}

/// Fraction of features classified correctly: informative and selected, or
/// noise and not selected. `selected` must be as large as the informative set.
pub fn feature_recovery(selected: &[usize], informative: &[bool]) -> Result<f64> {
    let m = informative.len();
    let wanted = informative.iter().filter(|&&b| b).count();
    if selected.len() != wanted {
        return Err(MwkError::input(format!(
            "selected {} features but the mask has {wanted} informative",
            selected.len()
        )));
    }
    let mut chosen = vec![false; m];
    for &v in selected {
        if v >= m || chosen[v] {
            return Err(MwkError::input(format!("invalid or repeated feature index {v}")));
        }
        chosen[v] = true;
    }
    let correct = chosen.iter().zip(informative).filter(|(c, i)| c == i).count();
    Ok(correct as f64 / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Pair-counting ARI straight from the definition over all point pairs.
    fn ari_pairs(a: &[usize], b: &[usize]) -> f64 {
        let n = a.len();
        let (mut both, mut only_a, mut only_b, mut pairs) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            for j in i + 1..n {
                let sa = a[i] == a[j];
                let sb = b[i] == b[j];
                pairs += 1.0;
                if sa && sb {
                    both += 1.0;
                }
                if sa {
                    only_a += 1.0;
                }
                if sb {
                    only_b += 1.0;
                }
            }
        }
        let expected = only_a * only_b / pairs;
        let max = 0.5 * (only_a + only_b);
        (both - expected) / (max - expected)
    }

    #[test]
    fn ari_examples() {
        let t = [0, 0, 1, 1, 2, 2];
        assert_eq!(ari(&t, &t).unwrap(), 1.0);
        assert_eq!(ari(&t, &[5, 5, 3, 3, 9, 9]).unwrap(), 1.0);
        assert_eq!(ari(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), -0.5);
        assert!(ari(&[0, 1], &[0]).is_err());
        assert!(ari(&[0], &[0]).is_err());
    }

    #[test]
    fn ari_degenerate_denominator() {
        assert_eq!(ari(&[0, 0, 0], &[1, 1, 1]).unwrap(), 1.0);
        assert_eq!(ari(&[0, 1, 2], &[2, 0, 1]).unwrap(), 1.0);
        assert_eq!(ari(&[0, 0, 0], &[0, 1, 2]).unwrap(), 0.0);
    }

    #[test]
    fn ari_agrees_with_pair_counting() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let mut checked = 0;
        while checked < 50 {
            let n = rng.random_range(2..=60);
            let ka = rng.random_range(1..=6);
            let kb = rng.random_range(1..=6);
            let a: Vec<usize> = (0..n).map(|_| rng.random_range(0..ka)).collect();
            let b: Vec<usize> = (0..n).map(|_| rng.random_range(0..kb)).collect();
            let oracle = ari_pairs(&a, &b);
            if !oracle.is_finite() {
                continue;
            }
            let got = ari(&a, &b).unwrap();
            assert!((got - oracle).abs() <= 1e-12, "{got} vs {oracle}");
            checked += 1;
        }
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(cluster_entropy(&[0, 0, 1, 1], &[3, 3, 4, 4]).unwrap(), 0.0);
        assert!((cluster_entropy(&[0, 0], &[0, 1]).unwrap() - 1.0).abs() < 1e-15);
        // {A,A,B} and {B,B}: (3/5)·H(2/3, 1/3).
        let h = cluster_entropy(&[0, 0, 0, 1, 1], &[0, 0, 1, 1, 1]).unwrap();
        let h23 = -(2.0 / 3.0f64) * (2.0 / 3.0f64).log2() - (1.0 / 3.0f64) * (1.0 / 3.0f64).log2();
        assert!((h - 0.6 * h23).abs() < 1e-15);
        assert!((h - 0.551).abs() < 1e-3);
        assert!(cluster_entropy(&[], &[]).is_err());
    }

    #[test]
    fn recovery_examples() {
        let mask = [true, true, true, true, false, false];
        assert_eq!(feature_recovery(&[0, 1, 2, 3], &mask).unwrap(), 1.0);
        assert!((feature_recovery(&[0, 1, 2, 4], &mask).unwrap() - 4.0 / 6.0).abs() < 1e-15);
        assert_eq!(feature_recovery(&[2, 3], &[true, true, false, false]).unwrap(), 0.0);
        assert!(feature_recovery(&[0, 1], &mask).is_err());
        assert!(feature_recovery(&[0, 0, 1, 2], &mask).is_err());
    }

    proptest! {
        #[test]
        fn ari_symmetric_and_relabel_invariant(
            pairs in prop::collection::vec((0usize..4, 0usize..5), 2..60),
            shift in 1usize..50,
        ) {
            let a: Vec<usize> = pairs.iter().map(|p| p.0).collect();
            let b: Vec<usize> = pairs.iter().map(|p| p.1).collect();
            let b_relabeled: Vec<usize> = b.iter().map(|x| (x + shift) * 7).collect();
            let x = ari(&a, &b).unwrap();
            prop_assert!((x - ari(&b, &a).unwrap()).abs() < 1e-12);
            prop_assert!((x - ari(&a, &b_relabeled).unwrap()).abs() < 1e-12);
            prop_assert!(x <= 1.0 + 1e-12);
        }

        #[test]
        fn entropy_relabel_invariant_and_bounded(
            pairs in prop::collection::vec((0usize..4, 0usize..5), 1..60),
        ) {
            let pred: Vec<usize> = pairs.iter().map(|p| p.0).collect();
            let truth: Vec<usize> = pairs.iter().map(|p| p.1).collect();
            let h = cluster_entropy(&pred, &truth).unwrap();
            let pred2: Vec<usize> = pred.iter().map(|x| 10 - x).collect();
            let truth2: Vec<usize> = truth.iter().map(|x| x * 3 + 1).collect();
            prop_assert!((h - cluster_entropy(&pred2, &truth2).unwrap()).abs() < 1e-12);
            let classes = truth.iter().collect::<std::collections::HashSet<_>>().len() as f64;
            prop_assert!(h >= 0.0 && h <= classes.log2() + 1e-12);
        }

        #[test]
        fn recovery_is_one_iff_exact(mask in prop::collection::vec(any::<bool>(), 1..12), seed in any::<u64>()) {
            let wanted = mask.iter().filter(|&&b| b).count();
            let mut idx: Vec<usize> = (0..mask.len()).collect();
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            idx.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let sel: Vec<usize> = idx[..wanted].to_vec();
            let exact = sel.iter().all(|&v| mask[v]);
            let r = feature_recovery(&sel, &mask).unwrap();
            prop_assert_eq!(r == 1.0, exact);
        }
    }
}

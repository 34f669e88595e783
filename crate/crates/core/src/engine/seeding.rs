use rand::Rng as _;

use super::{weights, CentroidSet, WeightMatrix};
use crate::data::{Dataset, Matrix};
use crate::error::{MwkError, Result};
use crate::minkowski::{self, CenterMode, Exponent};
use crate::seed::Rng;

/// Seeding outcome: the centroids and the rows they were copied from.
#[derive(Clone, Debug, PartialEq)]
pub struct Seeds {
    pub centroids: CentroidSet,
    pub indices: Vec<usize>,
    /// The sampling mass ran out before `k` points were chosen (duplicates);
    /// the remainder was drawn uniformly among unchosen rows.
    pub fallback: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MwkSeeds {
    pub centroids: CentroidSet,
    pub weights: WeightMatrix,
    pub indices: Vec<usize>,
    pub fallback: bool,
    /// Every global dispersion was zero and weights defaulted to `1/m`.
    pub uniform_weights: bool,
}

fn check_k(data: &Dataset, k: usize) -> Result<()> {
    if k == 0 || k > data.n() {
        return Err(MwkError::input(format!("k must be in [1, n={}], got {k}", data.n())));
    }
    Ok(())
}

fn centroids_from(data: &Dataset, indices: &[usize]) -> CentroidSet {
    let mut z = Matrix::zeros(indices.len(), data.m());
    for (l, &i) in indices.iter().enumerate() {
        z.row_mut(l).copy_from_slice(data.row(i));
    }
    CentroidSet::new(z).expect("rows of a validated dataset")
}

/// Draw an index with probability proportional to `mass`, excluding chosen rows.
/// Returns `None` when no positive mass remains.
fn sample_proportional(mass: &[f64], chosen: &[bool], rng: &mut Rng) -> Option<usize> {
    let total: f64 = mass.iter().zip(chosen).filter(|(_, &c)| !c).map(|(&d, _)| d).sum();
    if !(total > 0.0 && total.is_finite()) {
        return None;
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = None;
    for (i, (&d, &c)) in mass.iter().zip(chosen).enumerate() {
        if c || d <= 0.0 {
            continue;
        }
        acc += d;
        last_positive = Some(i);
        if acc > target {
            return Some(i);
        }
    }
    last_positive
}

fn sample_unchosen(chosen: &[bool], rng: &mut Rng) -> usize {
    let free: Vec<usize> = (0..chosen.len()).filter(|&i| !chosen[i]).collect();
    free[rng.random_range(0..free.len())]
}

/// Shared k-means++-style loop: first row uniform, then proportional to
/// `dist(row, newest centroid)` folded into a running minimum.
fn proportional_seeding<F>(data: &Dataset, k: usize, rng: &mut Rng, dist: F) -> (Vec<usize>, bool)
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    let n = data.n();
    let mut chosen = vec![false; n];
    let mut indices = Vec::with_capacity(k);
    let first = rng.random_range(0..n);
    chosen[first] = true;
    indices.push(first);
    let mut nearest = vec![f64::INFINITY; n];
    let mut fallback = false;
    while indices.len() < k {
        let newest = data.row(*indices.last().expect("non-empty"));
        for (i, slot) in nearest.iter_mut().enumerate() {
            let d = dist(data.row(i), newest);
            if d < *slot {
                *slot = d;
            }
        }
        let next = match sample_proportional(&nearest, &chosen, rng) {
            Some(i) => i,
            None => {
                fallback = true;
                sample_unchosen(&chosen, rng)
            }
        };
        chosen[next] = true;
        indices.push(next);
    }
    (indices, fallback)
}

/// k-means++: uniform first pick, then rows drawn with probability
/// proportional to the squared Euclidean distance to the nearest chosen centroid.
pub fn kmeanspp_init(data: &Dataset, k: usize, rng: &mut Rng) -> Result<Seeds> {
    check_k(data, k)?;
    let (indices, fallback) = proportional_seeding(data, k, rng, |x, z| {
        x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum()
    });
    Ok(Seeds { centroids: centroids_from(data, &indices), indices, fallback })
}

/// `k` distinct rows drawn uniformly.
pub fn random_init(data: &Dataset, k: usize, rng: &mut Rng) -> Result<Seeds> {
    check_k(data, k)?;
    let indices = rand::seq::index::sample(rng, data.n(), k).into_vec();
    Ok(Seeds { centroids: centroids_from(data, &indices), indices, fallback: false })
}

/// MWK++ seeding.
///
/// 1. first centroid uniform;
/// 2. exact Minkowski center `c` of the whole dataset;
/// 3. global dispersions `D_v = Σ_i |x_iv - c_v|^p`;
/// 4. `D_v += mean(D)`;
/// 5. `w_v = 1 / Σ_u (D_v/D_u)^(1/(p-1))`, replicated to `k` rows;
///
/// then each further centroid is drawn with probability proportional to the
/// (un-squared) weighted Minkowski distance to its nearest chosen centroid.
pub fn mwkpp_init(data: &Dataset, k: usize, p: Exponent, rng: &mut Rng) -> Result<MwkSeeds> {
    check_k(data, k)?;
    let pv = p.value();
    // Draw the first centroid before anything else touches the stream.
    let first = rng.random_range(0..data.n());

    let mut column = Vec::with_capacity(data.n());
    let dispersion: Vec<f64> = (0..data.m())
        .map(|v| {
            column.clear();
            column.extend((0..data.n()).map(|i| data.row(i)[v]));
            let c = minkowski::center(&mut column, pv, CenterMode::Exact);
            column.iter().map(|&x| minkowski::pow_abs(x - c, pv)).sum()
        })
        .collect();
    let uniform_weights = dispersion.iter().all(|&d| d == 0.0);
    let w = if uniform_weights {
        vec![1.0 / data.m() as f64; data.m()]
    } else {
        let mut d = dispersion;
        weights::regularize(&mut d);
        weights::optimal_weights(&d, p)
    };
    let w_pow: Vec<f64> = w.iter().map(|x| x.powf(pv)).collect();

    let mut chosen = vec![false; data.n()];
    chosen[first] = true;
    let mut indices = vec![first];
    let mut nearest = vec![f64::INFINITY; data.n()];
    let mut fallback = false;
    while indices.len() < k {
        let newest = data.row(*indices.last().expect("non-empty"));
        for (i, slot) in nearest.iter_mut().enumerate() {
            let d = minkowski::distance_with_powered_weights(data.row(i), newest, &w_pow, pv);
            if d < *slot {
                *slot = d;
            }
        }
        let next = match sample_proportional(&nearest, &chosen, rng) {
            Some(i) => i,
            None => {
                fallback = true;
                sample_unchosen(&chosen, rng)
            }
        };
        chosen[next] = true;
        indices.push(next);
    }

    Ok(MwkSeeds {
        centroids: centroids_from(data, &indices),
        weights: WeightMatrix::replicate(&w, k)?,
        indices,
        fallback,
        uniform_weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    fn ds(rows: &[Vec<f64>]) -> Dataset {
        Dataset::from_rows(rows).unwrap()
    }

    #[test]
    fn k_equals_n_picks_every_point() {
        let d = ds(&[vec![0.0], vec![1.0], vec![5.0], vec![-3.0]]);
        for s in 0..20 {
            let mut r = seed::rng(s);
            let mut idx = kmeanspp_init(&d, 4, &mut r).unwrap().indices;
            idx.sort_unstable();
            assert_eq!(idx, vec![0, 1, 2, 3]);
            let mut r = seed::rng(s);
            let mut idx = mwkpp_init(&d, 4, Exponent::new(1.5).unwrap(), &mut r).unwrap().indices;
            idx.sort_unstable();
            assert_eq!(idx, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn far_pairs_force_the_opposite_pair() {
        // Two coincident pairs far apart: once one pair is chosen its points
        // carry zero mass, so the second pick is from the other pair.
        let d = ds(&[vec![0.0, 0.0], vec![0.0, 0.0], vec![100.0, 100.0], vec![100.0, 100.0]]);
        for s in 0..50 {
            let seeds = kmeanspp_init(&d, 2, &mut seed::rng(s)).unwrap();
            assert_ne!(seeds.indices[0] / 2, seeds.indices[1] / 2, "seed {s}");
            assert!(!seeds.fallback);
        }
    }

    #[test]
    fn k_one_is_uniform_first_pick() {
        let d = ds(&(0..5).map(|i| vec![i as f64]).collect::<Vec<_>>());
        let mut counts = [0usize; 5];
        for s in 0..5000 {
            counts[kmeanspp_init(&d, 1, &mut seed::rng(s)).unwrap().indices[0]] += 1;
        }
        assert!(counts.iter().all(|&c| (850..=1150).contains(&c)), "{counts:?}");
    }

    #[test]
    fn duplicates_trigger_flagged_fallback() {
        let d = ds(&[vec![1.0], vec![1.0], vec![1.0]]);
        let seeds = kmeanspp_init(&d, 3, &mut seed::rng(3)).unwrap();
        assert!(seeds.fallback);
        let mut idx = seeds.indices.clone();
        idx.sort_unstable();
        assert_eq!(idx, vec![0, 1, 2]);
        let s = mwkpp_init(&d, 2, Exponent::new(2.0).unwrap(), &mut seed::rng(3)).unwrap();
        assert!(s.uniform_weights && s.fallback);
        assert_eq!(s.weights.row(0), &[1.0]);
    }

    #[test]
    fn k_out_of_range() {
        let d = ds(&[vec![1.0], vec![2.0]]);
        assert!(kmeanspp_init(&d, 3, &mut seed::rng(0)).is_err());
        assert!(kmeanspp_init(&d, 0, &mut seed::rng(0)).is_err());
        assert!(mwkpp_init(&d, 3, Exponent::new(2.0).unwrap(), &mut seed::rng(0)).is_err());
    }

    #[test]
    fn mwkpp_weights_identical_rows_and_symmetric_features() {
        // Every feature is the same column shuffled: equal dispersions.
        let base = [0.0, 1.0, 4.0, 2.0, 9.0, 3.0];
        let rows: Vec<Vec<f64>> =
            (0..6).map(|i| vec![base[i], base[(i + 2) % 6], base[(i + 4) % 6]]).collect();
        let s = mwkpp_init(&ds(&rows), 3, Exponent::new(1.7).unwrap(), &mut seed::rng(1)).unwrap();
        for l in 0..3 {
            assert_eq!(s.weights.row(l), s.weights.row(0));
            for &w in s.weights.row(l) {
                assert!((w - 1.0 / 3.0).abs() < 1e-9);
            }
        }
    }

    /// Enumerate MWK++'s second-pick distribution and compare with the
    /// uniform-weight Minkowski k-means++ probabilities.
    #[test]
    fn second_pick_distribution_matches_enumeration() {
        // Identical feature columns give w = 1/m exactly.
        let xs = [0.0, 0.5, 1.5, 3.0, 7.0, 7.5];
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x, x]).collect();
        let d = ds(&rows);
        let p = Exponent::new(1.6).unwrap();
        let trials = 30_000;
        let mut counts = [[0usize; 6]; 6];
        for s in 0..trials {
            let seeds = mwkpp_init(&d, 2, p, &mut seed::rng(s)).unwrap();
            counts[seeds.indices[0]][seeds.indices[1]] += 1;
        }
        for first in 0..6 {
            let dist: Vec<f64> = xs
                .iter()
                .map(|&x| 2.0 * 0.5f64.powf(1.6) * (x - xs[first]).abs().powf(1.6))
                .collect();
            let total: f64 = dist.iter().sum();
            let row_total: usize = counts[first].iter().sum();
            for j in 0..6 {
                let expect = dist[j] / total;
                let got = counts[first][j] as f64 / row_total as f64;
                let se = (expect * (1.0 - expect) / row_total as f64).sqrt();
                assert!((got - expect).abs() <= 4.0 * se + 1e-9, "first={first} j={j}: {got} vs {expect}");
            }
        }
    }
}

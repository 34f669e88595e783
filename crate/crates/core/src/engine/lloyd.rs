use super::seeding::kmeanspp_init;
use super::{CentroidSet, Partition};
use crate::data::Dataset;
use crate::error::{MwkError, Result};
use crate::exec::Exec;
use crate::seed;

/// Plain Euclidean k-means result (the k-means++ baseline).
#[derive(Clone, Debug, PartialEq)]
pub struct KMeansResult {
    pub partition: Partition,
    pub centroids: CentroidSet,
    /// Sum of squared Euclidean distances to assigned centroids.
    pub sse: f64,
    pub iterations: usize,
    pub converged: bool,
    pub seed: u64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd iterations from k-means++ seeds until the assignment repeats.
pub fn kmeans_fit(data: &Dataset, k: usize, max_iter: usize, exec: Exec, seed: u64) -> Result<KMeansResult> {
    if max_iter == 0 {
        return Err(MwkError::input("max_iter must be >= 1"));
    }
    let mut rng = seed::rng(seed);
    let mut z = kmeanspp_init(data, k, &mut rng)?.centroids;
    let m = data.m();
    let mut last: Option<Vec<usize>> = None;
    let mut iterations = 0;
    let mut converged = false;
    let mut repaired_last = false;
    for _ in 0..max_iter {
        let mut assignment = vec![0usize; data.n()];
        exec.fill(&mut assignment, |i| {
            let x = data.row(i);
            let mut best = (0, f64::INFINITY);
            for l in 0..k {
                let d = sq_dist(x, z.centroid(l));
                if d < best.1 {
                    best = (l, d);
                }
            }
            best.0
        });
        if !repaired_last && last.as_ref() == Some(&assignment) {
            converged = true;
            break;
        }
        let mut sums = vec![0.0; k * m];
        let mut counts = vec![0usize; k];
        for (i, &l) in assignment.iter().enumerate() {
            counts[l] += 1;
            for (s, &x) in sums[l * m..(l + 1) * m].iter_mut().zip(data.row(i)) {
                *s += x;
            }
        }
        let prev = z.clone();
        let mut taken = vec![false; data.n()];
        repaired_last = false;
        for l in 0..k {
            let row = z.matrix_mut().row_mut(l);
            if counts[l] > 0 {
                for (zv, s) in row.iter_mut().zip(&sums[l * m..(l + 1) * m]) {
                    *zv = s / counts[l] as f64;
                }
            } else {
                repaired_last = true;
                let far = (0..data.n())
                    .filter(|&i| !taken[i])
                    .map(|i| (i, sq_dist(data.row(i), prev.centroid(assignment[i]))))
                    .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
                taken[far.0] = true;
                row.copy_from_slice(data.row(far.0));
            }
        }
        iterations += 1;
        last = Some(assignment);
    }
    let assignment = last.expect("at least one pass");
    let sse = assignment.iter().enumerate().map(|(i, &l)| sq_dist(data.row(i), z.centroid(l))).sum();
    Ok(KMeansResult {
        partition: Partition::new(assignment, k)?,
        centroids: z,
        sse,
        iterations,
        converged,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separates_obvious_groups() {
        let d = Dataset::from_rows(&[vec![0.0, 0.0], vec![0.2, 0.1], vec![9.0, 9.0], vec![9.1, 8.8]]).unwrap();
        for s in 0..10 {
            let r = kmeans_fit(&d, 2, 50, Exec::Sequential, s).unwrap();
            let a = r.partition.assignment();
            assert_eq!(a[0], a[1]);
            assert_eq!(a[2], a[3]);
            assert_ne!(a[0], a[2]);
            assert!(r.converged);
        }
    }
}

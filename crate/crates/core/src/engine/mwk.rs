use serde::{Deserialize, Serialize};

use super::seeding::{kmeanspp_init, mwkpp_init, random_init};
use super::{
    weights, CentroidSet, ClusteringResult, FitFlags, FitOptions, Init, Partition, Regularization,
    WeightMatrix,
};
use crate::data::{Dataset, Matrix};
use crate::error::{MwkError, Result};
use crate::exec::Exec;
use crate::minkowski::{self, CenterMode, Exponent};
use crate::seed;

/// Per-cluster, per-feature dispersions `D_lv = Σ_{i∈S_l} |x_iv - z_lv|^p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionMatrix {
    pub d: Matrix,
    pub p: Exponent,
}

fn check_shapes(data: &Dataset, centroids: &CentroidSet, weights: Option<&WeightMatrix>) -> Result<()> {
    if centroids.m() != data.m() {
        return Err(MwkError::DimensionMismatch { expected: data.m(), got: centroids.m() });
    }
    if let Some(w) = weights {
        if w.m() != data.m() {
            return Err(MwkError::DimensionMismatch { expected: data.m(), got: w.m() });
        }
        if w.k() != centroids.k() {
            return Err(MwkError::DimensionMismatch { expected: centroids.k(), got: w.k() });
        }
    }
    Ok(())
}

fn check_partition(data: &Dataset, partition: &Partition) -> Result<()> {
    if partition.n() != data.n() {
        return Err(MwkError::DimensionMismatch { expected: data.n(), got: partition.n() });
    }
    Ok(())
}

/// Assign every point to the cluster with the smallest weighted distance;
/// ties go to the lowest cluster index.
pub fn mwk_assign(
    data: &Dataset,
    centroids: &CentroidSet,
    weights: &WeightMatrix,
    p: Exponent,
    exec: Exec,
) -> Result<Partition> {
    check_shapes(data, centroids, Some(weights))?;
    let pv = p.value();
    let w_pow = weights.powered(pv);
    let mut assignment = vec![0usize; data.n()];
    exec.fill(&mut assignment, |i| nearest(data.row(i), centroids, &w_pow, pv).0);
    Partition::new(assignment, centroids.k())
}

/// Nearest cluster. A candidate is abandoned once its partial sum reaches the
/// best distance so far; terms are non-negative, so the result is unchanged.
#[inline]
fn nearest(x: &[f64], centroids: &CentroidSet, w_pow: &Matrix, p: f64) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for l in 0..centroids.k() {
        let z = centroids.centroid(l);
        let w = w_pow.row(l);
        let mut acc = 0.0;
        for v in 0..x.len() {
            acc += w[v] * minkowski::pow_abs(x[v] - z[v], p);
            if acc >= best.1 {
                break;
            }
        }
        if acc < best.1 {
            best = (l, acc);
        }
    }
    best
}

/// Result of a centroid update: new centers plus any clusters that were empty.
#[derive(Clone, Debug, PartialEq)]
pub struct CentroidUpdate {
    pub centroids: CentroidSet,
    /// Clusters that had no members and were re-seeded.
    pub repaired: Vec<usize>,
}

/// Per-cluster, per-feature Minkowski centers.
///
/// An empty cluster is re-seeded at the point farthest (unweighted Minkowski
/// distance) from its current centroid in `previous`; distinct empty clusters
/// take distinct points, in cluster order.
pub fn mwk_update_centroids(
    data: &Dataset,
    partition: &Partition,
    previous: &CentroidSet,
    p: Exponent,
    mode: CenterMode,
    exec: Exec,
) -> Result<CentroidUpdate> {
    check_partition(data, partition)?;
    check_shapes(data, previous, None)?;
    if previous.k() != partition.k() {
        return Err(MwkError::DimensionMismatch { expected: partition.k(), got: previous.k() });
    }
    let skip = vec![false; partition.k()];
    Ok(update_centroids(data, partition, &partition.members(), previous, p.value(), mode, exec, &skip))
}

/// Centroid update that leaves rows flagged in `skip` as they are in `previous`.
#[allow(clippy::too_many_arguments)]
fn update_centroids(
    data: &Dataset,
    partition: &Partition,
    members: &[Vec<usize>],
    previous: &CentroidSet,
    pv: f64,
    mode: CenterMode,
    exec: Exec,
    skip: &[bool],
) -> CentroidUpdate {
    let m = data.m();
    let rows: Vec<Option<Vec<f64>>> = exec.map(partition.k(), |l| {
        let idx = &members[l];
        if idx.is_empty() {
            return None;
        }
        if skip[l] {
            return Some(previous.centroid(l).to_vec());
        }
        let mut buf = Vec::with_capacity(idx.len());
        Some(
            (0..m)
                .map(|v| {
                    buf.clear();
                    buf.extend(idx.iter().map(|&i| data.row(i)[v]));
                    minkowski::center(&mut buf, pv, mode)
                })
                .collect(),
        )
    });

    let mut z = previous.clone();
    let mut repaired = Vec::new();
    let mut taken = vec![false; data.n()];
    for (l, row) in rows.into_iter().enumerate() {
        match row {
            Some(r) => z.matrix_mut().row_mut(l).copy_from_slice(&r),
            None => repaired.push(l),
        }
    }
    for &l in &repaired {
        let far = (0..data.n())
            .filter(|&i| !taken[i])
            .map(|i| {
                let own = previous.centroid(partition.assignment()[i]);
                let d: f64 = data.row(i).iter().zip(own).map(|(a, b)| minkowski::pow_abs(a - b, pv)).sum();
                (i, d)
            })
            .fold(None, |best: Option<(usize, f64)>, cand| match best {
                Some(b) if b.1 >= cand.1 => Some(b),
                _ => Some(cand),
            });
        if let Some((i, _)) = far {
            taken[i] = true;
            z.matrix_mut().row_mut(l).copy_from_slice(data.row(i));
        }
    }
    CentroidUpdate { centroids: z, repaired }
}

/// Within-cluster dispersions for the given partition and centers.
pub fn dispersions(
    data: &Dataset,
    partition: &Partition,
    centroids: &CentroidSet,
    p: Exponent,
) -> Result<DispersionMatrix> {
    check_partition(data, partition)?;
    check_shapes(data, centroids, None)?;
    let pv = p.value();
    let mut d = Matrix::zeros(centroids.k(), data.m());
    for (i, &l) in partition.assignment().iter().enumerate() {
        let z = centroids.centroid(l);
        let row = d.row_mut(l);
        for ((acc, &x), &zv) in row.iter_mut().zip(data.row(i)).zip(z) {
            *acc += minkowski::pow_abs(x - zv, pv);
        }
    }
    Ok(DispersionMatrix { d, p })
}

/// Closed-form weights per cluster from regularized dispersions. Rows of
/// empty or zero-spread clusters are uniform.
pub fn mwk_update_weights(
    data: &Dataset,
    partition: &Partition,
    centroids: &CentroidSet,
    p: Exponent,
    reg: Regularization,
) -> Result<WeightMatrix> {
    let disp = dispersions(data, partition, centroids, p)?;
    Ok(weights_from_dispersions(&disp.d, p, reg))
}

fn weights_from_dispersions(d: &Matrix, p: Exponent, reg: Regularization) -> WeightMatrix {
    let mut w = Matrix::zeros(d.rows(), d.cols());
    for l in 0..d.rows() {
        let (row, _) = weights::regularized_weights(d.row(l), p, reg);
        w.row_mut(l).copy_from_slice(&row);
    }
    WeightMatrix::from_rows_unchecked(w)
}

/// `Σ_l Σ_v w_lv^p D_lv`, the objective regrouped by cluster and feature.
fn objective_from_dispersions(d: &Matrix, w: &WeightMatrix, pv: f64) -> f64 {
    let w_pow = w.powered(pv);
    d.as_slice().iter().zip(w_pow.as_slice()).map(|(a, b)| a * b).sum()
}

/// `W_p = Σ_l Σ_{i∈S_l} Σ_v w_lv^p |x_iv - z_lv|^p`.
pub fn mwk_objective(
    data: &Dataset,
    partition: &Partition,
    centroids: &CentroidSet,
    weights: &WeightMatrix,
    p: Exponent,
) -> Result<f64> {
    check_partition(data, partition)?;
    check_shapes(data, centroids, Some(weights))?;
    let pv = p.value();
    let w_pow = weights.powered(pv);
    Ok(partition
        .assignment()
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            minkowski::distance_with_powered_weights(data.row(i), centroids.centroid(l), w_pow.row(l), pv)
        })
        .sum())
}

/// Fit MWK: assign, update centers, update weights, until the assignment
/// repeats or `max_iter` passes complete.
pub fn mwk_fit(
    data: &Dataset,
    k: usize,
    p: Exponent,
    init: &Init,
    opts: &FitOptions,
    seed: u64,
) -> Result<ClusteringResult> {
    if k == 0 || k > data.n() {
        return Err(MwkError::input(format!("k must be in [1, n={}], got {k}", data.n())));
    }
    if opts.max_iter == 0 {
        return Err(MwkError::input("max_iter must be >= 1"));
    }
    let mut rng = seed::rng(seed);
    let mut flags = FitFlags::default();
    let (mut z, mut w) = match init {
        Init::Random => (random_init(data, k, &mut rng)?.centroids, WeightMatrix::uniform(k, data.m())),
        Init::KMeansPlusPlus => {
            let s = kmeanspp_init(data, k, &mut rng)?;
            flags.seeding_fallback = s.fallback;
            (s.centroids, WeightMatrix::uniform(k, data.m()))
        }
        Init::MwkPlusPlus => {
            let s = mwkpp_init(data, k, p, &mut rng)?;
            flags.seeding_fallback = s.fallback;
            flags.uniform_weight_fallback = s.uniform_weights;
            (s.centroids, s.weights)
        }
        Init::Given(z, w) => {
            if z.k() != k {
                return Err(MwkError::DimensionMismatch { expected: k, got: z.k() });
            }
            check_shapes(data, z, Some(w))?;
            (z.clone(), w.clone())
        }
    };

    let mut last: Option<Partition> = None;
    let mut last_repaired = false;
    let mut history = Vec::new();
    let mut converged = false;
    // Members each centroid row was last computed from; a row whose members
    // have not changed is already their center.
    let mut center_of: Vec<Option<Vec<usize>>> = vec![None; k];
    for _ in 0..opts.max_iter {
        let part = mwk_assign(data, &z, &w, p, opts.exec)?;
        if !last_repaired && last.as_ref().is_some_and(|prev| prev.assignment() == part.assignment()) {
            converged = true;
            break;
        }
        let members = part.members();
        let skip: Vec<bool> = (0..k).map(|l| center_of[l].as_ref() == Some(&members[l])).collect();
        let update = update_centroids(data, &part, &members, &z, p.value(), opts.mode, opts.exec, &skip);
        last_repaired = !update.repaired.is_empty();
        flags.empty_cluster_repairs += update.repaired.len();
        for (l, mem) in members.into_iter().enumerate() {
            center_of[l] = if update.repaired.contains(&l) { None } else { Some(mem) };
        }
        z = update.centroids;
        let disp = dispersions(data, &part, &z, p)?;
        w = weights_from_dispersions(&disp.d, p, opts.regularization);
        history.push(objective_from_dispersions(&disp.d, &w, p.value()));
        last = Some(part);
    }
    let partition = last.expect("max_iter >= 1 runs at least one pass");
    Ok(ClusteringResult {
        objective: *history.last().expect("one pass"),
        iterations: history.len(),
        partition,
        centroids: z,
        weights: w,
        p,
        converged,
        history,
        seed,
        flags,
    })
}

//! Seeding, the MWK alternating minimization, and restart orchestration.

mod lloyd;
mod mwk;
mod restart;
mod seeding;
mod weights;

pub use lloyd::{kmeans_fit, KMeansResult};
pub use mwk::{
    dispersions, mwk_assign, mwk_fit, mwk_objective, mwk_update_centroids, mwk_update_weights,
    CentroidUpdate, DispersionMatrix,
};
pub use restart::{restart_best, run_restarts};
pub use seeding::{kmeanspp_init, mwkpp_init, random_init, MwkSeeds, Seeds};
pub use weights::{optimal_weights, regularize, regularized_weights};

use serde::{Deserialize, Serialize};

use crate::data::Matrix;
use crate::error::{MwkError, Result};
use crate::exec::Exec;
use crate::minkowski::{CenterMode, Exponent};

/// `k × m` cluster centers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentroidSet(Matrix);

impl CentroidSet {
    pub fn new(z: Matrix) -> Result<Self> {
        if z.rows() == 0 {
            return Err(MwkError::input("centroid set needs k >= 1"));
        }
        if z.as_slice().iter().any(|x| !x.is_finite()) {
            return Err(MwkError::input("centroids must be finite"));
        }
        Ok(CentroidSet(z))
    }

    pub fn k(&self) -> usize {
        self.0.rows()
    }

    pub fn m(&self) -> usize {
        self.0.cols()
    }

    pub fn centroid(&self, l: usize) -> &[f64] {
        self.0.row(l)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut Matrix {
        &mut self.0
    }
}

/// `k × m` row-stochastic feature weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightMatrix(Matrix);

/// Row sums must match 1 to this tolerance.
pub const SIMPLEX_TOL: f64 = 1e-9;

impl WeightMatrix {
    pub fn new(w: Matrix) -> Result<Self> {
        if w.rows() == 0 || w.cols() == 0 {
            return Err(MwkError::input("weight matrix must be non-empty"));
        }
        for (l, row) in w.iter_rows().enumerate() {
            if row.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
                return Err(MwkError::input(format!("weight row {l} has a negative or non-finite entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > SIMPLEX_TOL {
                return Err(MwkError::input(format!("weight row {l} sums to {s}, expected 1")));
            }
        }
        Ok(WeightMatrix(w))
    }

    pub fn uniform(k: usize, m: usize) -> Self {
        WeightMatrix(Matrix::filled(k, m, 1.0 / m as f64))
    }

    /// `k` copies of one weight row.
    pub fn replicate(row: &[f64], k: usize) -> Result<Self> {
        let data = row.iter().copied().cycle().take(row.len() * k).collect();
        Self::new(Matrix::from_vec(k, row.len(), data)?)
    }

    pub(crate) fn from_rows_unchecked(w: Matrix) -> Self {
        WeightMatrix(w)
    }

    pub fn k(&self) -> usize {
        self.0.rows()
    }

    pub fn m(&self) -> usize {
        self.0.cols()
    }

    pub fn row(&self, l: usize) -> &[f64] {
        self.0.row(l)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    /// Each entry raised to the p-th power, as used by the distance.
    pub(crate) fn powered(&self, p: f64) -> Matrix {
        let data = self.0.as_slice().iter().map(|&w| w.powf(p)).collect();
        Matrix::from_vec(self.k(), self.m(), data).expect("same shape")
    }
}

/// Hard assignment of `n` points to `k` clusters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<usize>,
    sizes: Vec<usize>,
}

impl Partition {
    pub fn new(assignment: Vec<usize>, k: usize) -> Result<Self> {
        let mut sizes = vec![0; k];
        for (i, &l) in assignment.iter().enumerate() {
            if l >= k {
                return Err(MwkError::input(format!("point {i} assigned to cluster {l} >= k={k}")));
            }
            sizes[l] += 1;
        }
        Ok(Partition { assignment, sizes })
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    /// Row indices of each cluster, in ascending order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (i, &l) in self.assignment.iter().enumerate() {
            out[l].push(i);
        }
        out
    }
}

/// How a fit obtains its initial centroids and weights.
#[derive(Clone, Debug, PartialEq)]
pub enum Init {
    /// `k` distinct points chosen uniformly, uniform weights (the original MWK start).
    Random,
    /// k-means++ centroids (squared Euclidean sampling), uniform weights.
    KMeansPlusPlus,
    /// Relevance-aware MWK++ seeding.
    MwkPlusPlus,
    Given(CentroidSet, WeightMatrix),
}

/// Weight-update regularization applied to within-cluster dispersions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularization {
    /// Add the cluster's mean dispersion to each of its entries.
    #[default]
    MeanShift,
    /// Use raw dispersions; features with zero dispersion share the row.
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub mode: CenterMode,
    pub max_iter: usize,
    pub regularization: Regularization,
    pub exec: Exec,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            mode: CenterMode::Exact,
            max_iter: 100,
            regularization: Regularization::MeanShift,
            exec: Exec::Parallel,
        }
    }
}

/// Degenerate events encountered during a fit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitFlags {
    /// Seeding ran out of positive sampling mass and drew uniformly from unchosen points.
    pub seeding_fallback: bool,
    /// All global dispersions were zero; seeding weights fell back to uniform.
    pub uniform_weight_fallback: bool,
    /// Number of empty clusters re-seeded at the farthest point.
    pub empty_cluster_repairs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusteringResult {
    pub partition: Partition,
    pub centroids: CentroidSet,
    pub weights: WeightMatrix,
    pub p: Exponent,
    /// Final value of the weighted Minkowski objective.
    pub objective: f64,
    /// Number of completed assign/update passes.
    pub iterations: usize,
    /// True if the assignment repeated before `max_iter` was reached.
    pub converged: bool,
    /// Objective after each completed pass.
    pub history: Vec<f64>,
    pub seed: u64,
    pub flags: FitFlags,
}

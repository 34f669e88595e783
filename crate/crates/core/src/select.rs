//! Weight-stability feature selection (FS-MWK++ and the subsampled SFS-MWK++).
//!
//! For each exponent in a grid, the lowest-objective MWK++ restart contributes
//! its `k × m` weight matrix to a stack. A feature's score is the median of its
//! weights over every stored `(p, l)` row; the top-`r` scores are selected.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::engine::{restart_best, FitOptions, WeightMatrix};
use crate::error::{MwkError, Result};
use crate::minkowski::{self, Exponent};
use crate::seed::{self, derive_seed, Rng};

/// Ordered set of Minkowski exponents, strictly increasing, all > 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentGrid(Vec<Exponent>);

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let step = (hi - lo) / (count - 1) as f64;
    (0..count).map(|i| ((lo + i as f64 * step) * 1e10).round() / 1e10).collect()
}

impl ExponentGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(MwkError::input("exponent grid is empty"));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(MwkError::input("exponent grid must be strictly increasing"));
        }
        Ok(ExponentGrid(values.into_iter().map(Exponent::new).collect::<Result<_>>()?))
    }

    /// 1.1, 1.2, …, 3.0 (20 values).
    pub fn fine() -> Self {
        Self::new(linspace(1.1, 3.0, 20)).expect("valid")
    }

    /// Ten equally spaced values from 1.1 to 3.0.
    pub fn coarse() -> Self {
        Self::new(linspace(1.1, 3.0, 10)).expect("valid")
    }

    /// `fine`, `coarse`, or a comma-separated list of exponents.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "fine" => Ok(Self::fine()),
            "coarse" => Ok(Self::coarse()),
            list => {
                let values = list
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|e| MwkError::input(format!("bad exponent {t:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::new(values)
            }
        }
    }

    pub fn values(&self) -> &[Exponent] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One retained weight matrix: the best restart at exponent `p` on sample `sample_id`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StackEntry {
    pub p: Exponent,
    pub grid_index: usize,
    pub sample_id: usize,
    pub weights: WeightMatrix,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightStack {
    pub k: usize,
    pub m: usize,
    pub entries: Vec<StackEntry>,
}

impl WeightStack {
    fn merge(k: usize, m: usize, parts: Vec<Vec<StackEntry>>) -> Self {
        let mut entries: Vec<StackEntry> = parts.into_iter().flatten().collect();
        entries.sort_by_key(|e| (e.sample_id, e.grid_index));
        WeightStack { k, m, entries }
    }

    /// Every stored weight of feature `v`, over all entries and rows.
    pub fn feature_weights(&self, v: usize) -> Vec<f64> {
        self.entries.iter().flat_map(|e| (0..self.k).map(move |l| e.weights.row(l)[v])).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    /// Median weight per feature.
    pub scores: Vec<f64>,
    /// Features by descending score, ties by lower index.
    pub order: Vec<usize>,
    /// The first `r` entries of `order`.
    pub selected: Vec<usize>,
}

impl FeatureRanking {
    pub fn from_scores(scores: Vec<f64>, r: usize) -> Result<Self> {
        if r == 0 || r > scores.len() {
            return Err(MwkError::input(format!("r must be in [1, m={}], got {r}", scores.len())));
        }
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        let selected = order[..r].to_vec();
        Ok(FeatureRanking { scores, order, selected })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectOptions {
    pub grid: ExponentGrid,
    /// MWK++ restarts per exponent (and per subsample).
    pub restarts: usize,
    pub fit: FitOptions,
    pub seed: u64,
}

impl Default for SelectOptions {
    fn default() -> Self {
        SelectOptions { grid: ExponentGrid::fine(), restarts: 25, fit: FitOptions::default(), seed: 0 }
    }
}

/// A ranking with the stack it was aggregated from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub ranking: FeatureRanking,
    pub stack: WeightStack,
    /// Subsample size, for the subsampled selector.
    pub sample_size: Option<usize>,
}

fn grid_item(data: &Dataset, k: usize, g: usize, sample_id: usize, opts: &SelectOptions) -> Result<StackEntry> {
    let p = opts.grid.values()[g];
    let seed = derive_seed(opts.seed, &[g as u64, sample_id as u64]);
    let best = restart_best(data, k, p, opts.restarts, seed, &opts.fit)?;
    Ok(StackEntry { p, grid_index: g, sample_id, weights: best.weights, objective: best.objective })
}

/// Best-restart weights for every exponent of the grid (`sample_id = 0`).
pub fn collect_weights(data: &Dataset, k: usize, opts: &SelectOptions) -> Result<WeightStack> {
    check_restarts(opts)?;
    let entries = opts.fit.exec.try_map(opts.grid.len(), |g| grid_item(data, k, g, 0, opts))?;
    Ok(WeightStack::merge(k, data.m(), vec![entries]))
}

fn check_restarts(opts: &SelectOptions) -> Result<()> {
    if opts.restarts == 0 {
        return Err(MwkError::input("restarts must be >= 1"));
    }
    Ok(())
}

/// Per-feature median over the flattened `(entry, row)` multiset.
pub fn median_aggregate(stack: &WeightStack) -> Result<Vec<f64>> {
    if stack.entries.is_empty() {
        return Err(MwkError::input("weight stack is empty"));
    }
    Ok((0..stack.m)
        .map(|v| minkowski::median_in_place(&mut stack.feature_weights(v)))
        .collect())
}

/// FS-MWK++ on the full dataset.
pub fn fs_mwkpp(data: &Dataset, k: usize, r: usize, opts: &SelectOptions) -> Result<Selection> {
    if r == 0 || r > data.m() {
        return Err(MwkError::input(format!("r must be in [1, m={}], got {r}", data.m())));
    }
    let stack = collect_weights(data, k, opts)?;
    let ranking = FeatureRanking::from_scores(median_aggregate(&stack)?, r)?;
    Ok(Selection { ranking, stack, sample_size: None })
}

/// Uniform sample of `size` distinct rows. Sizes above `n` are clamped; the
/// flag reports the clamp.
pub fn subsample(data: &Dataset, size: usize, rng: &mut Rng) -> Result<(Dataset, bool)> {
    if size == 0 {
        return Err(MwkError::input("subsample size must be >= 1"));
    }
    let clamped = size > data.n();
    let size = size.min(data.n());
    let rows = rand::seq::index::sample(rng, data.n(), size).into_vec();
    Ok((data.select_rows(&rows)?, clamped))
}

/// `round(k·√n)` clamped to `[k, n]`.
pub fn sample_size(n: usize, k: usize) -> usize {
    let raw = (k as f64 * (n as f64).sqrt()).round() as usize;
    raw.clamp(k.min(n), n)
}

/// Stream tag for subsample draws, kept apart from the grid seeds.
const SUBSAMPLE_STREAM: u64 = 0x5355_4253;

/// SFS-MWK++: `outer` fresh subsamples of size `round(k·√n)`, each run
/// through the grid; one median over everything retained.
pub fn sfs_mwkpp(data: &Dataset, k: usize, r: usize, outer: usize, opts: &SelectOptions) -> Result<Selection> {
    if r == 0 || r > data.m() {
        return Err(MwkError::input(format!("r must be in [1, m={}], got {r}", data.m())));
    }
    if outer == 0 {
        return Err(MwkError::input("outer iterations must be >= 1"));
    }
    check_restarts(opts)?;
    let ns = sample_size(data.n(), k);
    let samples: Vec<Dataset> = (0..outer)
        .map(|i| {
            let mut rng = seed::rng(derive_seed(opts.seed, &[SUBSAMPLE_STREAM, i as u64]));
            subsample(data, ns, &mut rng).map(|(d, _)| d)
        })
        .collect::<Result<_>>()?;
    let g = opts.grid.len();
    let entries = opts.fit.exec.try_map(outer * g, |item| {
        let (i, gi) = (item / g, item % g);
        grid_item(&samples[i], k, gi, i, opts)
    })?;
    let stack = WeightStack::merge(k, data.m(), vec![entries]);
    let ranking = FeatureRanking::from_scores(median_aggregate(&stack)?, r)?;
    Ok(Selection { ranking, stack, sample_size: Some(ns) })
}

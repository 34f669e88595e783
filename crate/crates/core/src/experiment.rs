//! Desk-scale benchmark protocols: clustering accuracy of k-means++, MWK and
//! MWK++ across an exponent grid, and feature recovery of FS-MWK++.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::engine::{kmeans_fit, mwk_fit, FitOptions, Init};
use crate::error::{MwkError, Result};
use crate::io::normalize_range;
use crate::metrics::{ari, feature_recovery};
use crate::seed::derive_seed;
use crate::select::{fs_mwkpp, ExponentGrid, SelectOptions};
use crate::synth::{generate, ConfigSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single value.
    pub std: f64,
}

impl MeanStd {
    pub fn of(xs: &[f64]) -> Self {
        if xs.is_empty() {
            return MeanStd { mean: f64::NAN, std: f64::NAN };
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() < 2 {
            0.0
        } else {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        MeanStd { mean, std }
    }
}

/// Generate a dataset and range-normalize it (noise features included).
pub fn generate_normalized(spec: &ConfigSpec) -> Result<Dataset> {
    let norm = normalize_range(&generate(spec)?)?;
    if !norm.dropped.is_empty() {
        return Err(MwkError::input(format!("generated dataset has constant features {:?}", norm.dropped)));
    }
    Ok(norm.data)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table2Options {
    pub grid: ExponentGrid,
    /// Independent runs per (dataset, algorithm, exponent).
    pub runs: usize,
    pub fit: FitOptions,
    pub seed: u64,
}

impl Default for Table2Options {
    fn default() -> Self {
        Table2Options { grid: ExponentGrid::fine(), runs: 25, fit: FitOptions::default(), seed: 0 }
    }
}

/// Mean ARI over runs for one dataset: k-means++ once, MWK and MWK++ per exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetScores {
    pub kmeanspp: f64,
    pub mwk: Vec<f64>,
    pub mwkpp: Vec<f64>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn max(xs: &[f64]) -> f64 {
    xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

impl DatasetScores {
    pub fn mwk_all(&self) -> f64 {
        mean(&self.mwk)
    }
    pub fn mwk_best(&self) -> f64 {
        max(&self.mwk)
    }
    pub fn mwkpp_all(&self) -> f64 {
        mean(&self.mwkpp)
    }
    pub fn mwkpp_best(&self) -> f64 {
        max(&self.mwkpp)
    }
}

const KMEANS_STREAM: u64 = 0;
const MWK_STREAM: u64 = 1;
const MWKPP_STREAM: u64 = 2;

fn labels_of(data: &Dataset) -> Result<&[usize]> {
    data.labels().ok_or_else(|| MwkError::input("benchmark dataset has no labels"))
}

/// Score one labelled dataset. Run `r` of exponent `g` uses seed
/// `derive_seed(seed, [stream, g, r])`.
pub fn score_dataset(data: &Dataset, k: usize, opts: &Table2Options, seed: u64) -> Result<DatasetScores> {
    let truth = labels_of(data)?;
    if opts.runs == 0 {
        return Err(MwkError::input("runs must be >= 1"));
    }
    let runs = opts.runs;
    let exec = opts.fit.exec;
    let km = exec.try_map(runs, |r| {
        let fit = kmeans_fit(data, k, opts.fit.max_iter, exec, derive_seed(seed, &[KMEANS_STREAM, r as u64]))?;
        ari(truth, fit.partition.assignment())
    })?;
    let per_p = |init: &Init, stream: u64| -> Result<Vec<f64>> {
        let g = opts.grid.len();
        let scores = exec.try_map(g * runs, |item| {
            let (gi, r) = (item / runs, item % runs);
            let p = opts.grid.values()[gi];
            let fit = mwk_fit(data, k, p, init, &opts.fit, derive_seed(seed, &[stream, gi as u64, r as u64]))?;
            ari(truth, fit.partition.assignment())
        })?;
        Ok(scores.chunks(runs).map(mean).collect())
    };
    Ok(DatasetScores {
        kmeanspp: mean(&km),
        mwk: per_p(&Init::Random, MWK_STREAM)?,
        mwkpp: per_p(&Init::MwkPlusPlus, MWKPP_STREAM)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub config: String,
    pub datasets: usize,
    pub kmeanspp: MeanStd,
    pub mwk_all: MeanStd,
    pub mwk_best: MeanStd,
    pub mwkpp_all: MeanStd,
    pub mwkpp_best: MeanStd,
    pub per_dataset: Vec<DatasetScores>,
}

impl Table2Row {
    pub fn from_scores(config: &str, per_dataset: Vec<DatasetScores>) -> Self {
        let col = |f: fn(&DatasetScores) -> f64| MeanStd::of(&per_dataset.iter().map(f).collect::<Vec<_>>());
        Table2Row {
            config: config.to_string(),
            datasets: per_dataset.len(),
            kmeanspp: col(|s| s.kmeanspp),
            mwk_all: col(DatasetScores::mwk_all),
            mwk_best: col(DatasetScores::mwk_best),
            mwkpp_all: col(DatasetScores::mwkpp_all),
            mwkpp_best: col(DatasetScores::mwkpp_best),
            per_dataset,
        }
    }
}

/// One benchmark row: `datasets` normalized datasets of `config`, dataset
/// `d` generated from `derive_seed(seed, [d])`.
pub fn table2_row(config: &ConfigSpec, datasets: usize, opts: &Table2Options) -> Result<Table2Row> {
    let scores = (0..datasets)
        .map(|d| {
            let s = derive_seed(opts.seed, &[d as u64]);
            let data = generate_normalized(&config.with_seed(s))?;
            score_dataset(&data, config.k_clusters, opts, s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table2Row::from_scores(&config.name(), scores))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table3Row {
    pub config: String,
    pub datasets: usize,
    pub recovery: MeanStd,
    pub per_dataset: Vec<f64>,
}

/// FS-MWK++ feature recovery with `r` set to the informative count.
pub fn recovery_of(data: &Dataset, k: usize, opts: &SelectOptions) -> Result<f64> {
    let mask = data.informative().ok_or_else(|| MwkError::input("dataset has no informative mask"))?;
    let r = mask.iter().filter(|&&b| b).count();
    let sel = fs_mwkpp(data, k, r, opts)?;
    feature_recovery(&sel.ranking.selected, mask)
}

pub fn table3_row(config: &ConfigSpec, datasets: usize, opts: &SelectOptions) -> Result<Table3Row> {
    let per_dataset = (0..datasets)
        .map(|d| {
            let s = derive_seed(opts.seed, &[d as u64]);
            let data = generate_normalized(&config.with_seed(s))?;
            recovery_of(&data, config.k_clusters, &SelectOptions { seed: s, ..opts.clone() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table3Row {
        config: config.name(),
        datasets,
        recovery: MeanStd::of(&per_dataset),
        per_dataset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::parse_config_name;

    #[test]
    fn mean_std() {
        let s = MeanStd::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(MeanStd::of(&[0.7]).std, 0.0);
    }

    #[test]
    fn small_table2_row_is_well_formed() {
        let spec = parse_config_name("120x3-2 +1NF").unwrap();
        let opts = Table2Options {
            grid: ExponentGrid::new(vec![1.5, 2.0]).unwrap(),
            runs: 3,
            fit: FitOptions::default(),
            seed: 5,
        };
        let row = table2_row(&spec, 2, &opts).unwrap();
        assert_eq!(row.config, "120x3-2 +1NF");
        assert_eq!(row.datasets, 2);
        for s in &row.per_dataset {
            assert_eq!(s.mwk.len(), 2);
            assert!(s.mwkpp_best() >= s.mwkpp_all() && s.mwk_best() >= s.mwk_all());
        }
        assert_eq!(row, table2_row(&spec, 2, &opts).unwrap());
    }

    #[test]
    fn small_table3_row_is_well_formed() {
        let spec = parse_config_name("150x3-2 +2NF").unwrap();
        let opts = SelectOptions {
            grid: ExponentGrid::new(vec![1.5, 2.5]).unwrap(),
            restarts: 3,
            fit: FitOptions::default(),
            seed: 2,
        };
        let row = table3_row(&spec, 2, &opts).unwrap();
        assert_eq!(row.per_dataset.len(), 2);
        assert!(row.per_dataset.iter().all(|r| (0.0..=1.0).contains(r)));
    }

    #[test]
    fn unlabelled_data_is_rejected() {
        let d = Dataset::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        assert!(score_dataset(&d, 2, &Table2Options::default(), 0).is_err());
    }
}

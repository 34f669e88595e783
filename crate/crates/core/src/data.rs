use serde::{Deserialize, Serialize};

use crate::error::{MwkError, Result};

/// Dense row-major matrix of `f64`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(MwkError::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(MwkError::DimensionMismatch { expected: cols, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter_rows().map(<[f64]>::to_vec).collect()
    }
}

/// An `n × m` data matrix with optional ground truth.
///
/// `labels` are class ids per row; `informative` flags each feature as an
/// original (informative) feature or an appended noise feature.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    values: Matrix,
    feature_names: Vec<String>,
    labels: Option<Vec<usize>>,
    informative: Option<Vec<bool>>,
}

impl Dataset {
    /// Build from a row-major matrix. Feature names default to `f0..f{m-1}`.
    pub fn new(values: Matrix) -> Result<Self> {
        if values.rows() == 0 || values.cols() == 0 {
            return Err(MwkError::input(format!(
                "dataset must be non-empty, got {}x{}",
                values.rows(),
                values.cols()
            )));
        }
        if let Some(pos) = values.as_slice().iter().position(|x| !x.is_finite()) {
            return Err(MwkError::NonFinite {
                value: values.as_slice()[pos],
                location: format!("row {}, feature {}", pos / values.cols(), pos % values.cols()),
            });
        }
        let feature_names = (0..values.cols()).map(|v| format!("f{v}")).collect();
        Ok(Dataset { values, feature_names, labels: None, informative: None })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.m() {
            return Err(MwkError::DimensionMismatch { expected: self.m(), got: names.len() });
        }
        self.feature_names = names;
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(MwkError::DimensionMismatch { expected: self.n(), got: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_informative(mut self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.m() {
            return Err(MwkError::DimensionMismatch { expected: self.m(), got: mask.len() });
        }
        self.informative = Some(mask);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.values.rows()
    }

    pub fn m(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    pub fn column(&self, v: usize) -> Vec<f64> {
        (0..self.n()).map(|i| self.values.get(i, v)).collect()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn informative(&self) -> Option<&[bool]> {
        self.informative.as_deref()
    }

    /// Number of features flagged informative, if a mask is present.
    pub fn informative_count(&self) -> Option<usize> {
        self.informative().map(|m| m.iter().filter(|&&b| b).count())
    }

    /// New dataset made of the given rows (in the given order), with metadata
    /// carried along.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(MwkError::input("row selection is empty"));
        }
        let m = self.m();
        let mut data = Vec::with_capacity(rows.len() * m);
        for &i in rows {
            if i >= self.n() {
                return Err(MwkError::input(format!("row {i} out of range for n={}", self.n())));
            }
            data.extend_from_slice(self.row(i));
        }
        Ok(Dataset {
            values: Matrix::from_vec(rows.len(), m, data)?,
            feature_names: self.feature_names.clone(),
            labels: self.labels.as_ref().map(|l| rows.iter().map(|&i| l[i]).collect()),
            informative: self.informative.clone(),
        })
    }

    /// New dataset restricted to the given features (in the given order).
    pub fn select_features(&self, features: &[usize]) -> Result<Self> {
        if features.is_empty() {
            return Err(MwkError::input("feature selection is empty"));
        }
        if let Some(&v) = features.iter().find(|&&v| v >= self.m()) {
            return Err(MwkError::input(format!("feature {v} out of range for m={}", self.m())));
        }
        let n = self.n();
        let mut data = Vec::with_capacity(n * features.len());
        for i in 0..n {
            let row = self.row(i);
            data.extend(features.iter().map(|&v| row[v]));
        }
        Ok(Dataset {
            values: Matrix::from_vec(n, features.len(), data)?,
            feature_names: features.iter().map(|&v| self.feature_names[v].clone()).collect(),
            labels: self.labels.clone(),
            informative: self.informative.as_ref().map(|mk| features.iter().map(|&v| mk[v]).collect()),
        })
    }
}

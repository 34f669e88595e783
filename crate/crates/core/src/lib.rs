//! Minkowski weighted k-means (MWK) with relevance-aware MWK++ seeding, and
//! the weight-stability feature selectors FS-MWK++ and SFS-MWK++.
//!
//! Module map:
//! - [`minkowski`]: weighted distances, dispersions, Minkowski centers
//! - [`engine`]: k-means++ / MWK++ seeding, the MWK alternating minimization, restarts
//! - [`select`]: weight stacks over an exponent grid, median aggregation, ranking
//! - [`theory`]: numeric forms of the noise-feature definition and the weight-stability bounds
//! - [`synth`]: Gaussian-cluster benchmark generator with appended noise features
//! - [`metrics`]: adjusted Rand index, cluster entropy, feature recovery
//! - [`io`]: CSV ingestion/emission and range normalization
//! - [`experiment`]: desk-scale benchmark protocols built on the above
//!
//! Data-parallel loops (restarts, exponent grids, subsamples, point assignment)
//! run on rayon when the `parallel` feature is enabled and [`Exec::Parallel`] is
//! requested; results never depend on which path ran.

pub mod data;
pub mod engine;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod io;
pub mod metrics;
pub mod minkowski;
pub mod seed;
pub mod select;
pub mod synth;
pub mod theory;

pub use data::{Dataset, Matrix};
pub use engine::{
    CentroidSet, ClusteringResult, FitOptions, Init, Partition, WeightMatrix,
};
pub use error::{MwkError, Result};
pub use exec::Exec;
pub use minkowski::{CenterMode, Exponent};
pub use select::{ExponentGrid, FeatureRanking, SelectOptions, Selection, WeightStack};

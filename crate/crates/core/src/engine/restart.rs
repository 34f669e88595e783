use super::mwk::mwk_fit;
use super::{ClusteringResult, FitOptions, Init};
use crate::data::Dataset;
use crate::error::Result;
use crate::minkowski::Exponent;
use crate::seed::derive_seed;

/// Run `restarts` independent fits, restart `r` seeded with
/// `derive_seed(base_seed, [r])`. Results are in restart order.
pub fn run_restarts(
    data: &Dataset,
    k: usize,
    p: Exponent,
    init: &Init,
    restarts: usize,
    base_seed: u64,
    opts: &FitOptions,
) -> Result<Vec<ClusteringResult>> {
    opts.exec.try_map(restarts, |r| {
        mwk_fit(data, k, p, init, opts, derive_seed(base_seed, &[r as u64]))
    })
}

/// Best of `restarts` MWK++ fits by objective; ties go to the lowest restart index.
pub fn restart_best(
    data: &Dataset,
    k: usize,
    p: Exponent,
    restarts: usize,
    base_seed: u64,
    opts: &FitOptions,
) -> Result<ClusteringResult> {
    let restarts = restarts.max(1);
    let runs = run_restarts(data, k, p, &Init::MwkPlusPlus, restarts, base_seed, opts)?;
    Ok(runs
        .into_iter()
        .reduce(|best, r| if r.objective < best.objective { r } else { best })
        .expect("restarts >= 1"))
}

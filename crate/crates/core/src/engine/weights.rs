//! Closed-form weight update from per-feature dispersions.

use super::Regularization;
use crate::minkowski::Exponent;

/// Add the mean of `d` to every entry.
pub fn regularize(d: &mut [f64]) {
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    d.iter_mut().for_each(|x| *x += mean);
}

/// Optimal weights `w_v = 1 / Σ_u (D_v / D_u)^(1/(p-1))` for one dispersion row.
///
/// Computed as the normalized form `D_v^(-e) / Σ_u D_u^(-e)` in log space.
/// Zero dispersions are the limit case: the zero-dispersion features share the
/// row equally. An all-zero row yields uniform weights.
pub fn optimal_weights(d: &[f64], p: Exponent) -> Vec<f64> {
    let m = d.len();
    let zeros = d.iter().filter(|&&x| x == 0.0).count();
    if zeros > 0 {
        let share = 1.0 / zeros as f64;
        return d.iter().map(|&x| if x == 0.0 { share } else { 0.0 }).collect();
    }
    let e = p.ratio_exponent();
    let logs: Vec<f64> = d.iter().map(|&x| -e * x.ln()).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = logs.iter().map(|&l| (l - top).exp()).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    debug_assert_eq!(w.len(), m);
    w
}

/// Weights from a raw dispersion row under the chosen regularization.
/// Returns the weights and whether the row was entirely zero.
pub fn regularized_weights(raw: &[f64], p: Exponent, reg: Regularization) -> (Vec<f64>, bool) {
    let all_zero = raw.iter().all(|&x| x == 0.0);
    if all_zero {
        return (vec![1.0 / raw.len() as f64; raw.len()], true);
    }
    match reg {
        Regularization::MeanShift => {
            let mut d = raw.to_vec();
            regularize(&mut d);
            (optimal_weights(&d, p), false)
        }
        Regularization::None => (optimal_weights(raw, p), false),
    }
}

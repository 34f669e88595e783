//! Primitives of the weighted Minkowski space.
//!
//! Distances and dispersions are always kept in p-th power form
//! (`Σ w^p |x - z|^p`); no root is ever taken.

use serde::{Deserialize, Serialize};

use crate::error::{MwkError, Result};

/// Minkowski exponent, finite and strictly greater than 1.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Exponent(f64);

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p > 1.0 {
            Ok(Exponent(p))
        } else {
            Err(MwkError::InvalidExponent(p))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 / (p - 1)`, the exponent applied to dispersion ratios in the weight update.
    pub fn ratio_exponent(self) -> f64 {
        1.0 / (self.0 - 1.0)
    }
}

impl TryFrom<f64> for Exponent {
    type Error = MwkError;
    fn try_from(p: f64) -> Result<Self> {
        Exponent::new(p)
    }
}

impl From<Exponent> for f64 {
    fn from(p: Exponent) -> f64 {
        p.0
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How per-cluster centers are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CenterMode {
    /// Minimize `Σ |x - c|^p` numerically.
    #[default]
    Exact,
    /// Median for `p < 1.5`, mean otherwise.
    Fast,
}

#[inline]
pub(crate) fn pow_abs(d: f64, p: f64) -> f64 {
    let a = d.abs();
    if p == 2.0 {
        a * a
    } else {
        a.powf(p)
    }
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    match values.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(MwkError::NonFinite { value: values[i], location: format!("{what}[{i}]") }),
        None => Ok(()),
    }
}

/// `Σ_v w_v^p |x_v - z_v|^p`.
pub fn weighted_minkowski_distance(x: &[f64], z: &[f64], w: &[f64], p: Exponent) -> Result<f64> {
    if z.len() != x.len() {
        return Err(MwkError::DimensionMismatch { expected: x.len(), got: z.len() });
    }
    if w.len() != x.len() {
        return Err(MwkError::DimensionMismatch { expected: x.len(), got: w.len() });
    }
    check_finite(x, "x")?;
    check_finite(z, "z")?;
    check_finite(w, "w")?;
    if let Some(i) = w.iter().position(|&wv| wv < 0.0) {
        return Err(MwkError::input(format!("negative weight {} at index {i}", w[i])));
    }
    let p = p.value();
    Ok(x.iter()
        .zip(z)
        .zip(w)
        .map(|((&xv, &zv), &wv)| pow_abs(wv, p) * pow_abs(xv - zv, p))
        .sum())
}

/// Distance with the weights already raised to the p-th power.
#[inline]
pub(crate) fn distance_with_powered_weights(x: &[f64], z: &[f64], w_pow: &[f64], p: f64) -> f64 {
    let mut acc = 0.0;
    for ((&xv, &zv), &wp) in x.iter().zip(z).zip(w_pow) {
        acc += wp * pow_abs(xv - zv, p);
    }
    acc
}

/// Scale-relative default stopping width for [`minkowski_center`].
pub fn default_tolerance(values: &[f64]) -> f64 {
    let (lo, hi) = min_max(values);
    1e-6 * (hi - lo + 1.0)
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// `Σ_i |x_i - c|^p`.
fn center_loss(values: &[f64], c: f64, p: f64) -> f64 {
    values.iter().map(|&x| pow_abs(x - c, p)).sum()
}

/// The minimizer of `Σ_i |values_i - c|^p`, to within `tol`.
///
/// The loss is strictly convex for `p > 1`, so golden-section search on
/// `[min, max]` brackets the unique minimizer; the midpoint of the final
/// bracket (width ≤ `tol`) is returned. At `p = 2` this is the mean, returned
/// directly.
pub fn minkowski_center(values: &[f64], p: Exponent, tol: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(MwkError::input("Minkowski center of an empty list"));
    }
    check_finite(values, "values")?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(MwkError::input(format!("tolerance must be positive, got {tol}")));
    }
    if p.value() == 2.0 {
        return Ok(mean(values));
    }
    Ok(golden_center(values, p.value(), tol))
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

pub(crate) fn golden_center(values: &[f64], p: f64, tol: f64) -> f64 {
    let (mut a, mut b) = min_max(values);
    if b - a <= tol {
        return 0.5 * (a + b);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = center_loss(values, x1, p);
    let mut f2 = center_loss(values, x2, p);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = center_loss(values, x1, p);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = center_loss(values, x2, p);
        }
    }
    0.5 * (a + b)
}

/// Component-wise median when `p < 1.5`, arithmetic mean otherwise.
pub fn minkowski_center_fast(values: &[f64], p: Exponent) -> Result<f64> {
    if values.is_empty() {
        return Err(MwkError::input("Minkowski center of an empty list"));
    }
    check_finite(values, "values")?;
    let mut buf = values.to_vec();
    Ok(fast_center(&mut buf, p.value()))
}

/// Fast-rule center; may reorder `values`.
pub(crate) fn fast_center(values: &mut [f64], p: f64) -> f64 {
    if p < 1.5 {
        median_in_place(values)
    } else {
        mean(values)
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Median with the even-count midpoint convention; reorders `values`.
pub(crate) fn median_in_place(values: &mut [f64]) -> f64 {
    let n = values.len();
    let mid = n / 2;
    let (lower, upper_mid, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper_mid;
    if n % 2 == 1 {
        upper
    } else {
        let lower_max = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower_max + upper)
    }
}

/// Center under the requested mode, using the default tolerance. At `p = 2`
/// the exact minimizer is the mean and is returned directly. May reorder `values`.
pub(crate) fn center(values: &mut [f64], p: f64, mode: CenterMode) -> f64 {
    match mode {
        CenterMode::Fast => fast_center(values, p),
        CenterMode::Exact if p == 2.0 => mean(values),
        CenterMode::Exact => golden_center(values, p, default_tolerance(values)),
    }
}

/// `Σ_i |values_i - center|^p`; zero for an empty list.
pub fn feature_dispersion(values: &[f64], center: f64, p: Exponent) -> Result<f64> {
    check_finite(values, "values")?;
    if !center.is_finite() {
        return Err(MwkError::NonFinite { value: center, location: "center".into() });
    }
    Ok(center_loss(values, center, p.value()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    /// Grid minimizer of the center loss, independent of the bracket search.
    fn grid_center(values: &[f64], pv: f64, step: f64) -> f64 {
        let (lo, hi) = min_max(values);
        let steps = ((hi - lo) / step).ceil() as usize;
        (0..=steps)
            .map(|s| (lo + s as f64 * step).min(hi))
            .map(|c| (c, center_loss(values, c, pv)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0
    }

    #[test]
    fn exponent_rejects_p_at_most_one() {
        assert!(Exponent::new(1.0).is_err());
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert!(Exponent::new(1.0001).is_ok());
    }

    #[test]
    fn distance_examples() {
        let d = weighted_minkowski_distance(&[1.0, -2.0], &[1.0, -2.0], &[0.3, 0.7], p(1.7)).unwrap();
        assert_eq!(d, 0.0);
        let d = weighted_minkowski_distance(&[0.0, 0.0], &[1.0, 1.0], &[0.5, 0.5], p(2.0)).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        let d = weighted_minkowski_distance(&[0.0, 3.0], &[0.0, 0.0], &[1.0, 0.0], p(2.0)).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn distance_errors() {
        assert!(matches!(
            weighted_minkowski_distance(&[0.0], &[0.0, 1.0], &[1.0], p(2.0)),
            Err(MwkError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            weighted_minkowski_distance(&[f64::INFINITY], &[0.0], &[1.0], p(2.0)),
            Err(MwkError::NonFinite { .. })
        ));
    }

    #[test]
    fn center_examples() {
        let c = minkowski_center(&[1.0, 2.0, 3.0], p(2.0), 1e-9).unwrap();
        assert!((c - 2.0).abs() < 1e-9);
        let tol = default_tolerance(&[0.0, 10.0]);
        for pv in [1.1, 1.5, 2.0, 3.7] {
            let c = minkowski_center(&[0.0, 10.0], p(pv), tol).unwrap();
            assert!((c - 5.0).abs() <= tol, "p={pv} c={c}");
        }
        // Oracle: grid search at 1e-5 resolution; analytic root of 2c² = (9-c)² is 9/(1+√2).
        let grid = grid_center(&[0.0, 0.0, 9.0], 3.0, 1e-5);
        assert!((grid - 3.7279).abs() < 1e-4);
        assert!((grid - 9.0 / (1.0 + 2f64.sqrt())).abs() < 1e-4);
        let c = minkowski_center(&[0.0, 0.0, 9.0], p(3.0), 1e-9).unwrap();
        assert!((c - 3.7279).abs() < 1e-4);
        assert!(minkowski_center(&[], p(2.0), 1e-6).is_err());
    }

    #[test]
    fn fast_center_rule() {
        let v = [0.0, 1.0, 100.0];
        assert_eq!(minkowski_center_fast(&v, p(1.2)).unwrap(), 1.0);
        let mean = 101.0 / 3.0;
        assert!((minkowski_center_fast(&v, p(2.0)).unwrap() - mean).abs() < 1e-12);
        // 1.5 is on the mean side of the rule.
        assert!((minkowski_center_fast(&v, p(1.5)).unwrap() - mean).abs() < 1e-12);
        assert_eq!(minkowski_center_fast(&[4.0, 1.0, 3.0, 2.0], p(1.1)).unwrap(), 2.5);
        assert!(minkowski_center_fast(&[], p(1.2)).is_err());
    }

    #[test]
    fn dispersion_examples() {
        assert_eq!(feature_dispersion(&[2.5, 2.5, 2.5], 2.5, p(1.3)).unwrap(), 0.0);
        assert!((feature_dispersion(&[0.0, 2.0], 1.0, p(2.0)).unwrap() - 2.0).abs() < 1e-15);
        assert!((feature_dispersion(&[0.0, 2.0], 1.0, p(3.0)).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(feature_dispersion(&[], 1.0, p(3.0)).unwrap(), 0.0);
        assert!(feature_dispersion(&[f64::NAN], 1.0, p(3.0)).is_err());
    }

    #[test]
    fn center_matches_grid_oracle_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let ps = [1.1, 1.5, 2.0, 2.5, 3.0];
        for trial in 0..100 {
            let n = rng.random_range(1..=50);
            let values: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
            let pv = ps[trial % ps.len()];
            let c = minkowski_center(&values, p(pv), default_tolerance(&values)).unwrap();
            let g = grid_center(&values, pv, 1e-4);
            assert!((c - g).abs() <= 1e-3, "trial {trial}: p={pv} c={c} grid={g}");
        }
    }

    proptest! {
        #[test]
        fn center_is_mean_at_p2(values in prop::collection::vec(-100.0f64..100.0, 1..40)) {
            let tol = default_tolerance(&values);
            let c = minkowski_center(&values, p(2.0), tol).unwrap();
            prop_assert!((c - mean(&values)).abs() <= tol);
        }

        #[test]
        fn center_is_translation_equivariant(
            values in prop::collection::vec(-10.0f64..10.0, 1..40),
            shift in -50.0f64..50.0,
            pv in 1.05f64..4.0,
        ) {
            let tol = default_tolerance(&values);
            let shifted: Vec<f64> = values.iter().map(|x| x + shift).collect();
            let a = minkowski_center(&values, p(pv), tol).unwrap();
            let b = minkowski_center(&shifted, p(pv), tol).unwrap();
            prop_assert!((b - (a + shift)).abs() <= 2.0 * tol);
            let (lo, hi) = min_max(&values);
            prop_assert!(a >= lo - tol && a <= hi + tol);
        }

        #[test]
        fn distance_symmetric_and_homogeneous_in_weights(
            xz in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0, 0.0f64..1.0), 1..12),
            lambda in 0.1f64..10.0,
            pv in 1.05f64..4.0,
        ) {
            let x: Vec<f64> = xz.iter().map(|t| t.0).collect();
            let z: Vec<f64> = xz.iter().map(|t| t.1).collect();
            let w: Vec<f64> = xz.iter().map(|t| t.2).collect();
            let ws: Vec<f64> = w.iter().map(|v| v * lambda).collect();
            let d = weighted_minkowski_distance(&x, &z, &w, p(pv)).unwrap();
            let d_rev = weighted_minkowski_distance(&z, &x, &w, p(pv)).unwrap();
            let d_scaled = weighted_minkowski_distance(&x, &z, &ws, p(pv)).unwrap();
            prop_assert!(d >= 0.0);
            prop_assert!((d - d_rev).abs() <= 1e-12 * (1.0 + d));
            prop_assert!((d_scaled - lambda.powf(pv) * d).abs() <= 1e-9 * (1.0 + d_scaled));
        }
    }
}

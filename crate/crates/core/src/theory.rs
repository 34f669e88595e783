//! Numeric checks behind weight stability: the noise-feature condition, the
//! `1/m` weight bounds, and the exponent-stability radius with its selection
//! condition.

use serde::{Deserialize, Serialize};

use crate::engine::DispersionMatrix;
use crate::error::{MwkError, Result};
use crate::minkowski::Exponent;
use crate::select::WeightStack;

/// Dispersion ratios `a_u = D_lv / D_lu` of one feature `v` in one cluster
/// against every feature `u`, at exponent `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioProfile {
    pub ratios: Vec<f64>,
    pub p: Exponent,
}

impl RatioProfile {
    pub fn new(ratios: Vec<f64>, p: Exponent) -> Result<Self> {
        if ratios.is_empty() {
            return Err(MwkError::input("ratio profile is empty"));
        }
        if let Some(a) = ratios.iter().find(|&&a| !(a > 0.0 && a.is_finite())) {
            return Err(MwkError::input(format!("ratios must be positive and finite, got {a}")));
        }
        Ok(RatioProfile { ratios, p })
    }

    /// Profile of feature `v` from one row of dispersions (includes `a_v = 1`).
    pub fn from_dispersions(row: &[f64], v: usize, p: Exponent) -> Result<Self> {
        if v >= row.len() {
            return Err(MwkError::input(format!("feature {v} out of range for m={}", row.len())));
        }
        Self::new(row.iter().map(|&du| row[v] / du).collect(), p)
    }
}

/// `A(p) = Σ_u a_u^(1/(p-1))`; the feature's weight is `1 / A`.
pub fn capital_a(profile: &RatioProfile) -> f64 {
    let e = profile.p.ratio_exponent();
    profile.ratios.iter().map(|&a| a.powf(e)).sum()
}

/// `L(p) = Σ_u a_u^(1/(p-1)) |ln a_u|`.
pub fn capital_l(profile: &RatioProfile) -> f64 {
    let e = profile.p.ratio_exponent();
    profile.ratios.iter().map(|&a| a.powf(e) * a.ln().abs()).sum()
}

/// Half-width of the exponent interval on which a weight margin `γ` above
/// `1/m` keeps the weight above `1/m`, under frozen dispersion ratios.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaBound {
    /// `γ · A² (p-1)² / L`; `+∞` when `L = 0`.
    pub value: f64,
    /// `L = 0`: every ratio is 1 and the weight does not move with `p`.
    pub unbounded: bool,
}

fn delta_from(gamma: f64, a: f64, l: f64, p: Exponent) -> Result<DeltaBound> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(MwkError::input(format!("gamma must be positive, got {gamma}")));
    }
    if !(a > 0.0) || !(l >= 0.0) {
        return Err(MwkError::input(format!("need A > 0 and L >= 0, got A={a}, L={l}")));
    }
    if l == 0.0 {
        return Ok(DeltaBound { value: f64::INFINITY, unbounded: true });
    }
    let pm1 = p.value() - 1.0;
    Ok(DeltaBound { value: gamma * a * a * pm1 * pm1 / l, unbounded: false })
}

pub fn delta_bound(gamma: f64, profile: &RatioProfile) -> Result<DeltaBound> {
    delta_from(gamma, capital_a(profile), capital_l(profile), profile.p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremInputs {
    /// Weight margin above `1/m`.
    pub gamma: f64,
    /// Proportion of clusters where the margin is attained, in (0, 1].
    pub alpha: f64,
    pub p: Exponent,
    pub a: f64,
    pub l: f64,
    pub m: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheck {
    pub value: f64,
    pub threshold: f64,
    pub satisfied: bool,
    pub unbounded: bool,
}

/// Selection condition `γ A² (p-1)² / L > 1/(2α)`.
pub fn theorem_condition(inputs: &TheoremInputs) -> Result<TheoremCheck> {
    if !(inputs.alpha > 0.0 && inputs.alpha <= 1.0) {
        return Err(MwkError::input(format!("alpha must be in (0, 1], got {}", inputs.alpha)));
    }
    let d = delta_from(inputs.gamma, inputs.a, inputs.l, inputs.p)?;
    let threshold = 1.0 / (2.0 * inputs.alpha);
    Ok(TheoremCheck { value: d.value, threshold, satisfied: d.value > threshold, unbounded: d.unbounded })
}

/// Largest `A` compatible with a weight of at least `1/m + γ`.
pub fn max_capital_a(m: usize, gamma: f64) -> f64 {
    1.0 / (1.0 / m as f64 + gamma)
}

/// Noise verdict for one cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseVerdict {
    pub noise: bool,
    /// A relevant feature had zero dispersion, making a ratio infinite.
    pub degenerate: bool,
}

/// Per cluster: is `(1/|R|) Σ_{u∈R} (D_lv / D_lu)^(1/(p-1)) > 1`?
pub fn is_noise_feature(disp: &DispersionMatrix, v: usize, relevant: &[usize]) -> Result<Vec<NoiseVerdict>> {
    let m = disp.d.cols();
    if relevant.is_empty() {
        return Err(MwkError::input("relevant feature set is empty"));
    }
    if v >= m || relevant.iter().any(|&u| u >= m) {
        return Err(MwkError::input("feature index out of range"));
    }
    if relevant.contains(&v) {
        return Err(MwkError::input(format!("feature {v} is in the relevant set")));
    }
    let e = disp.p.ratio_exponent();
    Ok((0..disp.d.rows())
        .map(|l| {
            let row = disp.d.row(l);
            let mut degenerate = false;
            let total: f64 = relevant
                .iter()
                .map(|&u| {
                    if row[u] == 0.0 {
                        degenerate = true;
                        if row[v] == 0.0 { 1.0 } else { f64::INFINITY }
                    } else {
                        (row[v] / row[u]).powf(e)
                    }
                })
                .sum();
            let avg = total / relevant.len() as f64;
            NoiseVerdict { noise: degenerate || avg > 1.0, degenerate }
        })
        .collect())
}

/// True unless the row has an entry below `1/m` and none above it.
pub fn pigeonhole_holds(row: &[f64]) -> bool {
    let u = 1.0 / row.len() as f64;
    !row.iter().any(|&w| w < u) || row.iter().any(|&w| w > u)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairAudit {
    pub p: f64,
    pub sample_id: usize,
    pub cluster: usize,
    /// Noise features with weight `< 1/m` in this row.
    pub noise_below: usize,
    pub noise_total: usize,
    /// Some feature has weight `> 1/m` in this row.
    pub any_above: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub pairs: Vec<PairAudit>,
    /// Per feature: largest `w - 1/m` over all rows.
    pub margins: Vec<f64>,
    /// Share of rows in which every noise feature is below `1/m`.
    pub rows_all_noise_below: f64,
    /// Share of (row, noise feature) cells below `1/m`.
    pub noise_cells_below: f64,
    /// Share of rows with some weight above `1/m`.
    pub rows_with_weight_above: f64,
}

/// Audit a stack against a known informative mask.
pub fn audit_run(stack: &WeightStack, informative: &[bool]) -> Result<AuditReport> {
    if informative.len() != stack.m {
        return Err(MwkError::DimensionMismatch { expected: stack.m, got: informative.len() });
    }
    let uniform = 1.0 / stack.m as f64;
    let noise: Vec<usize> = (0..stack.m).filter(|&v| !informative[v]).collect();
    let mut pairs = Vec::new();
    let mut margins = vec![f64::NEG_INFINITY; stack.m];
    for e in &stack.entries {
        for l in 0..stack.k {
            let row = e.weights.row(l);
            for (mg, &w) in margins.iter_mut().zip(row) {
                *mg = mg.max(w - uniform);
            }
            pairs.push(PairAudit {
                p: e.p.value(),
                sample_id: e.sample_id,
                cluster: l,
                noise_below: noise.iter().filter(|&&v| row[v] < uniform).count(),
                noise_total: noise.len(),
                any_above: row.iter().any(|&w| w > uniform),
            });
        }
    }
    let rows = pairs.len().max(1) as f64;
    let cells = (pairs.len() * noise.len()).max(1) as f64;
    Ok(AuditReport {
        rows_all_noise_below: pairs.iter().filter(|a| a.noise_below == a.noise_total).count() as f64 / rows,
        noise_cells_below: pairs.iter().map(|a| a.noise_below).sum::<usize>() as f64 / cells,
        rows_with_weight_above: pairs.iter().filter(|a| a.any_above).count() as f64 / rows,
        pairs,
        margins,
    })
}

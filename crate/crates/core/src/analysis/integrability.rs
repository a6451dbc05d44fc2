use serde::Serialize;

use super::AnalysisError;
use crate::dynamics::Trajectory;

/// Saturation threshold: the last decade may contribute at most this share.
pub const DEFAULT_THETA: f64 = 0.05;

/// Finite-horizon finiteness test for `∫ λ(t)·g(t) dt`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrabilityReport {
    pub exponent: f64,
    /// `ΔI_k = I(t_{k+1}) − I(t_k)` between consecutive samples.
    pub increments: Vec<f64>,
    /// `I(t_end)`.
    pub total: f64,
    /// Integral over the last decade `[t_end/10, t_end]`.
    pub last_decade: f64,
    pub theta: f64,
    /// `last_decade ≤ θ·total`; a vanishing integral counts as saturated.
    pub saturated: bool,
}

impl IntegrabilityReport {
    pub fn last_decade_share(&self) -> f64 {
        if self.total > 0.0 {
            self.last_decade / self.total
        } else {
            0.0
        }
    }
}

/// Builds the report from the running integral `cumulative` sampled at `t`.
///
/// The decade start is the last sample at or before `t_end/10`, so the
/// tested window is never shorter than a decade.
pub fn integrability_from_series(exponent: f64, t: &[f64], cumulative: &[f64], theta: f64) -> IntegrabilityReport {
    let n = cumulative.len().min(t.len());
    let increments: Vec<f64> = cumulative[..n].windows(2).map(|w| w[1] - w[0]).collect();
    let total = if n > 0 { cumulative[n - 1] } else { 0.0 };
    let t_end = if n > 0 { t[n - 1] } else { 0.0 };
    let k = (0..n).rev().find(|&i| t[i] <= t_end / 10.0 * (1.0 + 1e-12)).unwrap_or(0);
    let last_decade = if n > 0 { total - cumulative[k] } else { 0.0 };
    let saturated = total == 0.0 || last_decade <= theta * total;
    IntegrabilityReport { exponent, increments, total, last_decade, theta, saturated }
}

/// Saturation report for `∫(1+t)^r E(t) dt`.
pub fn weighted_energy_report(traj: &Trajectory, r: f64, theta: f64) -> Result<IntegrabilityReport, AnalysisError> {
    if r == -1.0 {
        return Err(AnalysisError::ExcludedExponent);
    }
    let series = traj
        .weighted_energy_series(r)
        .ok_or(AnalysisError::MissingAccumulator { kind: "weighted_energy", exponent: r })?;
    Ok(integrability_from_series(r, &traj.times(), &series, theta))
}

/// Reports for every configured weighted-energy exponent, sorted by exponent:
/// the empirical picture of the set of `r` with `∫λ_r E < ∞`.
pub fn integrability_set(traj: &Trajectory, theta: f64) -> Vec<IntegrabilityReport> {
    let mut exps = traj.meta.energy_exponents.clone();
    exps.sort_by(f64::total_cmp);
    exps.iter().filter_map(|&r| weighted_energy_report(traj, r, theta).ok()).collect()
}

/// Largest saturated exponent below the first unsaturated one (the
/// finite-horizon estimate of `sup` of the integrability set).
pub fn supremum_saturated(reports: &[IntegrabilityReport]) -> Option<f64> {
    let mut best = None;
    for r in reports {
        if !r.saturated {
            break;
        }
        best = Some(r.exponent);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convergent_and_divergent_integrals() {
        let t: Vec<f64> = (0..=100).map(|k| 10f64.powf(k as f64 * 0.05)).collect();
        // ∫₁ᵗ s^{-2} ds = 1 − 1/t converges.
        let conv: Vec<f64> = t.iter().map(|t| 1.0 - 1.0 / t).collect();
        let r = integrability_from_series(0.0, &t, &conv, DEFAULT_THETA);
        assert!(r.saturated);
        let sum: f64 = r.increments.iter().sum();
        assert!((sum - r.total).abs() < 1e-12);
        // ∫₁ᵗ ds/s = log t grows by the same amount every decade.
        let div: Vec<f64> = t.iter().map(|t| t.ln()).collect();
        let r = integrability_from_series(0.0, &t, &div, DEFAULT_THETA);
        assert!(!r.saturated);
        assert!((r.last_decade_share() - 0.2).abs() < 1e-9);
    }

    #[test]
    fn vanishing_integral_is_saturated() {
        let r = integrability_from_series(1.0, &[0.0, 1.0, 10.0, 100.0], &[0.0; 4], DEFAULT_THETA);
        assert!(r.saturated);
        assert_eq!(r.total, 0.0);
    }

    #[test]
    fn supremum_stops_at_first_failure() {
        let mk = |e: f64, s: bool| IntegrabilityReport {
            exponent: e,
            increments: vec![],
            total: 1.0,
            last_decade: 0.0,
            theta: 0.05,
            saturated: s,
        };
        assert_eq!(supremum_saturated(&[mk(-1.5, true), mk(0.0, true), mk(1.0, false), mk(2.0, true)]), Some(0.0));
        assert_eq!(supremum_saturated(&[mk(0.0, false)]), None);
    }
}

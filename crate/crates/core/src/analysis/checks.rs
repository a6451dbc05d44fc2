use serde::Serialize;

use super::integrability::{integrability_from_series, weighted_energy_report, IntegrabilityReport};
use super::rate::{tail_decay, TailDecay};
use super::AnalysisError;
use crate::dynamics::Trajectory;
use crate::model::CompositePotential;

fn speed_report(traj: &Trajectory, q: f64, theta: f64) -> Result<IntegrabilityReport, AnalysisError> {
    let series = traj
        .weighted_speed_series(q)
        .ok_or(AnalysisError::MissingAccumulator { kind: "weighted_speed", exponent: q })?;
    Ok(integrability_from_series(q, &traj.times(), &series, theta))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedDecayReport {
    pub r: f64,
    /// `∫λ_r E` saturation.
    pub premise: IntegrabilityReport,
    /// Tail of `t^{1+r}E(t)`.
    pub conclusion_decay: TailDecay,
    /// `∫λ_{r+1−α}|u'|²` saturation.
    pub conclusion_speed: IntegrabilityReport,
}

impl WeightedDecayReport {
    /// `t^{1+r}E` strictly smaller at `t_end` than a decade earlier and
    /// nonincreasing in between, or decayed past the underflow floor.
    pub fn decay_holds(&self) -> bool {
        let d = &self.conclusion_decay;
        d.superpolynomial || (d.nonincreasing && d.value_end < d.value_decade)
    }

    /// The implication premise ⇒ conclusions.
    pub fn holds(&self) -> bool {
        !self.premise.saturated || (self.decay_holds() && self.conclusion_speed.saturated)
    }
}

/// Weighted-energy decay: if `∫λ_r E < ∞` then `E = o(t^{−1−r})` and
/// `∫λ_{r+1−α}|u'|² < ∞`.
pub fn check_weighted_decay(traj: &Trajectory, r: f64, alpha: f64, theta: f64) -> Result<WeightedDecayReport, AnalysisError> {
    let premise = weighted_energy_report(traj, r, theta)?;
    let conclusion_decay = tail_decay(traj, 1.0 + r, 1.0)?;
    let conclusion_speed = speed_report(traj, r + 1.0 - alpha, theta)?;
    Ok(WeightedDecayReport { r, premise, conclusion_decay, conclusion_speed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnchorReport {
    /// `max (p̈ + γṗ − (3/2)|u'|² + E)`; the inequality asks for ≤ 0.
    pub max_violation: f64,
    pub at_t: f64,
    pub samples_checked: usize,
}

/// Evaluates `p̈ + γṗ − (3/2)|u'|² + E` at every sample with `t ≥ t_min`,
/// using the step-resolution triplet `p(t−h), p(t), p(t+h)` and central
/// differences.
pub fn check_anchor_inequality(traj: &Trajectory, t_min: f64) -> Result<AnchorReport, AnalysisError> {
    let h = traj.meta.h;
    let mut report = AnchorReport { max_violation: f64::NEG_INFINITY, at_t: f64::NAN, samples_checked: 0 };
    let mut wanted = 0;
    for s in traj.samples.iter().filter(|s| s.record.t >= t_min) {
        wanted += 1;
        if !(h > 0.0 && s.p_prev.is_finite() && s.p_next.is_finite()) {
            continue;
        }
        let pdd = (s.p_next - 2.0 * s.acc.p + s.p_prev) / (h * h);
        let pd = (s.p_next - s.p_prev) / (2.0 * h);
        let v = pdd + s.record.gamma * pd - 1.5 * s.record.speed_sq + s.record.energy;
        report.samples_checked += 1;
        if v > report.max_violation {
            report.max_violation = v;
            report.at_t = s.record.t;
        }
    }
    if wanted > 0 && report.samples_checked == 0 {
        return Err(AnalysisError::MissingData("step-resolution anchor triplets"));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapReport {
    pub alpha: f64,
    pub nu: f64,
    /// `∫λ_ν E`.
    pub premise: IntegrabilityReport,
    /// `∫λ_{ν+1−α} E`.
    pub conclusion: IntegrabilityReport,
}

impl BootstrapReport {
    pub fn holds(&self) -> bool {
        !self.premise.saturated || self.conclusion.saturated
    }
}

/// Weight bootstrap: for `ν < 2α − 1`, `∫λ_ν E < ∞` implies `∫λ_{ν+1−α} E < ∞`.
pub fn check_bootstrap(traj: &Trajectory, alpha: f64, nu: f64, theta: f64) -> Result<BootstrapReport, AnalysisError> {
    let bound = 2.0 * alpha - 1.0;
    if !(nu < bound) {
        return Err(AnalysisError::BadExponent { nu, bound });
    }
    let premise = weighted_energy_report(traj, nu, theta)?;
    let conclusion = weighted_energy_report(traj, nu + 1.0 - alpha, theta)?;
    Ok(BootstrapReport { alpha, nu, premise, conclusion })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// `(t, dist(u(t), argmin φ))` over the last decade.
    pub dist_to_argmin: Vec<(f64, f64)>,
    /// `max ‖u(2t) − u(t)‖` over sample pairs inside the last decade, with
    /// `2t` snapped to the nearest sample.
    pub cauchy_defect: f64,
    pub limit_point: Vec<f64>,
    /// `‖A u(t_end) + f(u(t_end))‖`.
    pub gradient_norm: f64,
    pub limit_in_argmin: bool,
}

impl ConvergenceReport {
    pub fn final_dist(&self) -> f64 {
        self.dist_to_argmin.last().map_or(f64::NAN, |p| p.1)
    }
}

/// Convergence diagnostics; `limit_in_argmin` is the gradient test
/// `‖∇φ(u(t_end))‖ ≤ grad_tol`.
pub fn check_convergence(
    traj: &Trajectory,
    cp: &CompositePotential,
    grad_tol: f64,
) -> Result<ConvergenceReport, AnalysisError> {
    if traj.is_empty() || traj.samples.iter().any(|s| s.state.u.len() != cp.dim()) {
        return Err(AnalysisError::MissingData("state vectors"));
    }
    let t = traj.times();
    let t_end = *t.last().unwrap();
    let lo = t_end / 10.0 * (1.0 - 1e-12);
    let tail: Vec<usize> = (0..t.len()).filter(|&i| t[i] >= lo).collect();
    let dist_to_argmin = tail.iter().map(|&i| (t[i], cp.dist_to_argmin(&traj.samples[i].state.u))).collect();
    let nearest = |target: f64| {
        (0..t.len()).min_by(|&a, &b| (t[a] - target).abs().total_cmp(&(t[b] - target).abs())).unwrap()
    };
    let mut cauchy_defect: f64 = 0.0;
    for &i in tail.iter().filter(|&&i| 2.0 * t[i] <= t_end * (1.0 + 1e-12)) {
        let j = nearest(2.0 * t[i]);
        let (a, b) = (&traj.samples[i].state.u, &traj.samples[j].state.u);
        let d = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        cauchy_defect = cauchy_defect.max(d);
    }
    let limit_point = traj.last().state.u.clone();
    let gradient_norm = cp.gradient_norm(&limit_point);
    Ok(ConvergenceReport {
        dist_to_argmin,
        cauchy_defect,
        limit_in_argmin: gradient_norm <= grad_tol,
        limit_point,
        gradient_norm,
    })
}

/// Saturation of `∫(1+t)^α |u'|²`, the hypothesis under which the trajectory converges.
pub fn check_speed_integrability(traj: &Trajectory, alpha: f64, theta: f64) -> Result<IntegrabilityReport, AnalysisError> {
    speed_report(traj, alpha, theta)
}

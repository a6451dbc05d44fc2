use serde::Serialize;

use crate::analysis::{AnchorReport, IntegrabilityReport, RateReport, TailDecay};

/// Structured analysis document written as `report.toml`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub run: RunInfo,
    pub energy: EnergySection,
    pub rate: RateSection,
    pub checks: ChecksSection,
    pub anchor: AnchorReport,
    pub convergence: ConvergenceSection,
    pub speed_integrability: IntegralSummary,
    /// `t^s·E(t)` tails for `s = 1` and `s = 1 + ᾱ`.
    pub tails: Vec<TailDecay>,
    pub integrability: Vec<IntegralSummary>,
    pub weighted_decay: Vec<WeightedDecaySummary>,
    /// Largest saturated weighted-energy exponent (exploratory).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub saturated_sup: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunInfo {
    pub problem: String,
    pub scheme: String,
    pub schedule: String,
    pub alpha: f64,
    pub k: f64,
    pub h: f64,
    pub t_end: f64,
    pub samples: usize,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergySection {
    pub initial: f64,
    pub last: f64,
    pub dissipation_residual: f64,
    pub tail_identity_defect: f64,
    pub max_rise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSection {
    /// `fit`, `superpolynomial` or `unavailable`.
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<RateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckOutcome {
    pub fn new(value: f64, tolerance: f64) -> Self {
        CheckOutcome { value, tolerance, pass: value <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChecksSection {
    pub dissipation: CheckOutcome,
    pub energy_monotone: CheckOutcome,
    pub anchor: CheckOutcome,
}

impl ChecksSection {
    pub fn failures(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if !self.dissipation.pass {
            v.push("dissipation");
        }
        if !self.energy_monotone.pass {
            v.push("energy-monotone");
        }
        if !self.anchor.pass {
            v.push("anchor");
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceSection {
    pub dist_to_argmin: f64,
    pub cauchy_defect: f64,
    pub gradient_norm: f64,
    pub limit_in_argmin: bool,
    pub limit_point: Vec<f64>,
}

/// [`IntegrabilityReport`] without the per-sample increments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralSummary {
    pub exponent: f64,
    pub total: f64,
    pub last_decade_share: f64,
    pub saturated: bool,
}

impl From<&IntegrabilityReport> for IntegralSummary {
    fn from(r: &IntegrabilityReport) -> Self {
        IntegralSummary {
            exponent: r.exponent,
            total: r.total,
            last_decade_share: r.last_decade_share(),
            saturated: r.saturated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedDecaySummary {
    pub r: f64,
    pub premise_saturated: bool,
    pub decay_holds: bool,
    pub speed_saturated: bool,
    pub holds: bool,
}

impl RunReport {
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("report serializes")
    }

    pub fn summary(&self) -> SummaryRow {
        let fit = self.rate.fit.as_ref();
        let energy_sat = self.integrability.iter().find(|s| (s.exponent + self.run.alpha).abs() < 1e-12);
        SummaryRow {
            problem: self.run.problem.clone(),
            alpha: self.run.alpha,
            k: self.run.k,
            h: self.run.h,
            t_end: self.run.t_end,
            status: self.run.status.clone(),
            rate_mode: self.rate.mode.clone(),
            fitted_exponent: fit.map_or(f64::NAN, |f| f.fitted_exponent),
            residual: fit.map_or(f64::NAN, |f| f.residual),
            dissipation_residual: self.energy.dissipation_residual,
            anchor_violation: self.anchor.max_violation,
            energy_saturated: energy_sat.is_some_and(|s| s.saturated),
            speed_saturated: self.speed_integrability.saturated,
            dist_to_argmin: self.convergence.dist_to_argmin,
        }
    }
}

/// One row of the flat run summary (`summary.csv`, and per cell in sweeps).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub problem: String,
    pub alpha: f64,
    pub k: f64,
    pub h: f64,
    pub t_end: f64,
    pub status: String,
    pub rate_mode: String,
    pub fitted_exponent: f64,
    pub residual: f64,
    pub dissipation_residual: f64,
    pub anchor_violation: f64,
    pub energy_saturated: bool,
    pub speed_saturated: bool,
    pub dist_to_argmin: f64,
}

impl SummaryRow {
    /// Row for a cell that produced no trajectory.
    pub fn failed(problem: &str, alpha: f64, k: f64, h: f64, t_end: f64, status: String) -> Self {
        SummaryRow {
            problem: problem.into(),
            alpha,
            k,
            h,
            t_end,
            status,
            rate_mode: "unavailable".into(),
            fitted_exponent: f64::NAN,
            residual: f64::NAN,
            dissipation_residual: f64::NAN,
            anchor_violation: f64::NAN,
            energy_saturated: false,
            speed_saturated: false,
            dist_to_argmin: f64::NAN,
        }
    }

    pub fn write_csv<W: std::io::Write>(rows: &[SummaryRow], out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

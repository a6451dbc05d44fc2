//! Diagnostics computed from trajectories: decay-rate fits, finiteness of
//! weighted integrals, the anchor inequality, the weight bootstrap and
//! convergence to the minimizer set.
//!
//! Every check here is a pure function of a [`Trajectory`](crate::dynamics::Trajectory).

mod checks;
mod integrability;
mod rate;

pub use checks::{
    check_anchor_inequality, check_bootstrap, check_convergence, check_weighted_decay, check_speed_integrability,
    AnchorReport, BootstrapReport, ConvergenceReport, WeightedDecayReport,
};
pub use integrability::{
    integrability_from_series, integrability_set, supremum_saturated, weighted_energy_report, IntegrabilityReport,
    DEFAULT_THETA,
};
pub use rate::{fit_decay_rate, fit_decay_samples, tail_decay, tail_decay_samples, RateReport, TailDecay, UNDERFLOW_FLOOR};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("trajectory has no {kind} accumulator for exponent {exponent}")]
    MissingAccumulator { kind: &'static str, exponent: f64 },
    #[error("energy underflows (E = {energy:e} at t = {t}); decay is superpolynomial on this window")]
    EnergyUnderflow { t: f64, energy: f64 },
    #[error("{found} samples in the window, need at least {needed}")]
    TooFewSamples { found: usize, needed: usize },
    #[error("bootstrap needs ν < 2α − 1 = {bound}, got ν = {nu}")]
    BadExponent { nu: f64, bound: f64 },
    #[error("exponent r = -1 is excluded")]
    ExcludedExponent,
    #[error("fit window must span between 0 and 2 decades, got {0}")]
    BadWindow(f64),
    #[error("trajectory carries no {0}")]
    MissingData(&'static str),
}

//! Time integration of `u'' + γ(t)u' + Au + f(u) = 0`.
//!
//! The production scheme is a fixed-step damped velocity-Verlet; every
//! integral the decay diagnostics need is accumulated step by step with the
//! trapezoidal rule. [`reference`] holds an adaptive Dormand–Prince solver
//! used only as a short-horizon oracle.

mod integrate;
pub mod reference;
mod stepper;
mod sum;
mod trajectory;

pub use integrate::{integrate, IntegratorConfig};
pub use stepper::{energy, step, Stepper, SCHEME_NAME};
pub use trajectory::{
    dissipation_residual, energy_increase, exponent_label, tail_identity_defect, AccumulatorSnapshot, Sample,
    Trajectory, TrajectoryMeta,
};

use crate::model::ModelError;

/// Position and velocity at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub t: f64,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
}

impl StateVector {
    pub fn new(t: f64, u: Vec<f64>, w: Vec<f64>) -> Self {
        StateVector { t, u, w }
    }

    /// Particle at rest at `u`.
    pub fn at_rest(u: Vec<f64>) -> Self {
        let w = vec![0.0; u.len()];
        StateVector { t: 0.0, u, w }
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.u.iter().chain(&self.w).all(|v| v.is_finite())
    }
}

/// Energy bookkeeping at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub t: f64,
    pub energy: f64,
    pub speed_sq: f64,
    pub gamma: f64,
    pub phi_gap: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("state became non-finite at t = {t} (step too large for the operator stiffness?)")]
    NonFinite { t: f64 },
    #[error("step h = {h} exceeds the stability bound h_max = {h_max}")]
    StepTooLarge { h: f64, h_max: f64 },
    #[error("exponent r = -1 is excluded from the weighted-energy list")]
    ExcludedExponent,
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("trajectory csv: {0}")]
    Csv(String),
}

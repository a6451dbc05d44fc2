//! Domain types: the operator `A`, the convex potential `F`, the composite
//! `φ = ½⟨A·,·⟩ + F` with its minimizer data, and damping schedules γ(t).

pub mod composite;
pub mod damping;
pub mod operator;
pub mod potential;

pub use composite::{argmin_flat_basis, critical_tolerance, minimize_phi, CompositePotential, MinimizerData};
pub use damping::{
    check_damping_hypothesis, check_derivative_condition, geometric_grid, DampingKind, DampingSchedule,
    HypothesisCheck,
};
pub use operator::{validate_semi_coercivity, CoercivityCertificate, OperatorSpec};
pub use potential::{gradient_fd_defect, midpoint_convexity_excess, PotentialKind, PotentialSpec};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("matrix must be square with 1 ≤ n ≤ 512, got {rows}×{cols}")]
    BadDimension { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite or out-of-range value in {0}")]
    NonFinite(&'static str),
    #[error("matrix is not symmetric (max |A_ij − A_ji| = {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },
    #[error("matrix is not positive semidefinite (smallest eigenvalue {smallest_eig:e})")]
    NotPositiveSemidefinite { smallest_eig: f64 },
    #[error("no μ > 0 for λ = {lambda}: smallest eigenvalue of A + λI is {smallest_eig_shifted:e}")]
    NotSemiCoercive { lambda: f64, smallest_eig_shifted: f64 },
    #[error("declared μ = {declared} exceeds the supported {supported}")]
    DeclaredMuTooLarge { declared: f64, supported: f64 },
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("custom damping schedule has no derivative")]
    MissingDerivative,
    #[error("minimizer search stopped after {iterations} iterations with ‖∇φ‖ = {gradient_norm:e}")]
    NoConvergence { iterations: usize, gradient_norm: f64 },
    #[error("point is not critical: ‖∇φ‖ = {gradient_norm:e} > {tolerance:e}")]
    NotCritical { gradient_norm: f64, tolerance: f64 },
}

//! Second-order evolution `u'' + γ(t)u' + Au + f(u) = 0` with friction that
//! vanishes like `γ(t) = K/(1+t)^α`, `α ∈ [0, 1)`.
//!
//! - [`model`]: the semi-coercive operator `A` and convex potentials `F`,
//!   certified together with the minimizer set of `φ = ½⟨Au,u⟩ + F`, plus
//!   damping schedules.
//! - [`dynamics`]: a fixed-step damped velocity-Verlet integrator that
//!   accumulates the energy balance and weighted integrals on a geometric
//!   sample grid. An adaptive reference solver serves as oracle.
//! - [`analysis`]: finite-horizon proxies for the asymptotic claims, from
//!   decay exponents and `o(t^{−s})` tails to convergence of the trajectory.
//! - [`problems`]: the certified problem catalog and custom problem files.
//! - [`cli`]: configured runs and sweeps, plus the acceptance suite.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod model;
pub mod problems;

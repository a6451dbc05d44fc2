use crate::model::operator::dot;
use crate::model::{CompositePotential, DampingSchedule};

use super::{DynamicsError, EnergyRecord, StateVector};

pub const SCHEME_NAME: &str = "damped-velocity-verlet";

/// Damped velocity-Verlet stepper with reusable force buffers.
///
/// One step from `t` to `t + h`, with `a = h·γ(t + h/2)/2`:
///
/// ```text
/// w ← (1 − a)·w + (h/2)·F(u)
/// u ← u + h·w
/// w ← (w + (h/2)·F(u)) / (1 + a)
/// ```
///
/// where `F(u) = −(Au + f(u))`. With γ ≡ 0 this is plain velocity Verlet.
pub struct Stepper<'a> {
    cp: &'a CompositePotential,
    sched: &'a DampingSchedule,
    h: f64,
    au: Vec<f64>,
    fu: Vec<f64>,
    force: Vec<f64>,
    phi: f64,
}

impl<'a> Stepper<'a> {
    /// Prepares the stepper at position `u` (the force there is cached).
    pub fn new(cp: &'a CompositePotential, sched: &'a DampingSchedule, h: f64, u: &[f64]) -> Self {
        let n = cp.dim();
        let mut s = Stepper { cp, sched, h, au: vec![0.0; n], fu: vec![0.0; n], force: vec![0.0; n], phi: 0.0 };
        s.refresh(u);
        s
    }

    fn refresh(&mut self, u: &[f64]) {
        self.cp.op.apply(u, &mut self.au);
        self.cp.pot.gradient(u, &mut self.fu);
        for ((f, a), b) in self.force.iter_mut().zip(&self.au).zip(&self.fu) {
            *f = -(a + b);
        }
        self.phi = 0.5 * dot(&self.au, u) + self.cp.pot.value(u);
    }

    /// Advances `state` in place to `t_next` (passed explicitly so callers can
    /// keep time as `t_start + n·h` without drift).
    #[inline]
    pub fn advance(&mut self, state: &mut StateVector, t_next: f64) -> Result<(), DynamicsError> {
        let h = self.h;
        let a = 0.5 * h * self.sched.gamma(state.t + 0.5 * h);
        let half = 0.5 * h;
        for ((w, u), f) in state.w.iter_mut().zip(state.u.iter_mut()).zip(&self.force) {
            *w = (1.0 - a) * *w + half * f;
            *u = flush(*u + h * *w);
        }
        self.refresh(&state.u);
        let inv = 1.0 / (1.0 + a);
        for (w, f) in state.w.iter_mut().zip(&self.force) {
            *w = flush((*w + half * f) * inv);
        }
        state.t = t_next;
        if !(self.phi.is_finite() && state.w.iter().all(|v| v.is_finite())) {
            return Err(DynamicsError::NonFinite { t: t_next });
        }
        Ok(())
    }

    /// φ(u) at the current position.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Energy of `state`, whose position must be the one last seen by the stepper.
    pub fn energy_record(&self, state: &StateVector) -> EnergyRecord {
        let speed_sq = dot(&state.w, &state.w);
        let phi_gap = gap(self.phi, self.cp.min_phi());
        EnergyRecord {
            t: state.t,
            energy: 0.5 * speed_sq + phi_gap,
            speed_sq,
            gamma: self.sched.gamma(state.t),
            phi_gap,
        }
    }
}

/// Entries below this magnitude are set to zero after each step, so products
/// of two surviving entries stay normal (≥ 1e−300). Subnormal arithmetic
/// would otherwise dominate the run time of fully decayed runs.
pub const FLUSH_BELOW: f64 = 1e-150;

#[inline(always)]
fn flush(x: f64) -> f64 {
    if x.abs() < FLUSH_BELOW {
        0.0
    } else {
        x
    }
}

/// Single damped-Verlet step returning the state at `t + h`.
pub fn step(
    state: &StateVector,
    h: f64,
    cp: &CompositePotential,
    sched: &DampingSchedule,
) -> Result<StateVector, DynamicsError> {
    if !(h > 0.0) {
        return Err(DynamicsError::InvalidConfig(format!("step must be positive, got {h}")));
    }
    if !state.is_finite() {
        return Err(DynamicsError::NonFinite { t: state.t });
    }
    let mut next = state.clone();
    let mut stepper = Stepper::new(cp, sched, h, &state.u);
    stepper.advance(&mut next, state.t + h)?;
    Ok(next)
}

/// `φ − min φ`, clamped at zero: near the minimizer rounding can put `φ`
/// a few ulps below the oracle's minimum, and E must stay nonnegative.
fn gap(phi: f64, min_phi: f64) -> f64 {
    (phi - min_phi).max(0.0)
}

/// `E = ½|w|² + φ(u) − min φ`.
pub fn energy(state: &StateVector, cp: &CompositePotential, sched: &DampingSchedule) -> EnergyRecord {
    let speed_sq = dot(&state.w, &state.w);
    let phi_gap = gap(cp.phi(&state.u), cp.min_phi());
    EnergyRecord { t: state.t, energy: 0.5 * speed_sq + phi_gap, speed_sq, gamma: sched.gamma(state.t), phi_gap }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{OperatorSpec, PotentialSpec};
    use nalgebra::DMatrix;

    fn scalar(a: f64) -> CompositePotential {
        let op = if a == 0.0 {
            OperatorSpec::new(DMatrix::zeros(1, 1), 1.0).unwrap()
        } else {
            OperatorSpec::diagonal(&[a], 0.0).unwrap()
        };
        CompositePotential::certify(op, PotentialSpec::zero()).unwrap()
    }

    #[test]
    fn free_motion() {
        let cp = scalar(0.0);
        let s = StateVector::new(0.0, vec![0.0], vec![1.0]);
        let next = step(&s, 0.1, &cp, &DampingSchedule::undamped()).unwrap();
        assert!((next.u[0] - 0.1).abs() < 1e-15);
        assert_eq!(next.w[0], 1.0);
        assert!((next.t - 0.1).abs() < 1e-15);
    }

    #[test]
    fn undamped_oscillator_conserves_energy_to_second_order() {
        let cp = scalar(1.0);
        let sched = DampingSchedule::undamped();
        let drift = |h: f64| {
            let mut s = StateVector::new(0.0, vec![1.0], vec![0.0]);
            let mut st = Stepper::new(&cp, &sched, h, &s.u);
            let e0 = st.energy_record(&s).energy;
            let steps = (100.0 / h).round() as usize;
            let mut worst: f64 = 0.0;
            for n in 1..=steps {
                st.advance(&mut s, n as f64 * h).unwrap();
                worst = worst.max((st.energy_record(&s).energy - e0).abs());
            }
            worst
        };
        let (d1, d2) = (drift(1e-2), drift(5e-3));
        assert!(d1 < 1e-4, "drift {d1}");
        assert!(d1 / d2 > 3.5, "ratio {}", d1 / d2);
    }

    #[test]
    fn energy_examples() {
        let cp = scalar(1.0);
        let sched = DampingSchedule::undamped();
        let e = energy(&StateVector::new(0.0, vec![1.0], vec![1.0]), &cp, &sched);
        assert_eq!(e.energy, 1.0);
        assert_eq!(energy(&StateVector::at_rest(vec![0.0]), &cp, &sched).energy, 0.0);

        let op = OperatorSpec::identity(2).unwrap();
        let pot = PotentialSpec::quartic_uniform(vec![0.0, 0.0], 1.0).unwrap();
        let cp = CompositePotential::certify(op, pot).unwrap();
        let e = energy(&StateVector::new(0.0, vec![1.0, 0.0], vec![0.0, 2.0]), &cp, &sched);
        // kinetic ½·4 = 2, quadratic ½·1, quartic ¼.
        let independent = 0.5 * (0.0f64 * 0.0 + 2.0 * 2.0) + 0.5 * 1.0 + 0.25 * 1.0f64.powi(4);
        assert_eq!(e.energy, 2.75);
        assert_eq!(e.energy, independent);
    }

    #[test]
    fn pure_friction_uses_cayley_factor() {
        let cp = scalar(0.0);
        let sched = DampingSchedule::constant(2.0).unwrap();
        let h = 0.1;
        let next = step(&StateVector::new(0.0, vec![0.0], vec![1.0]), h, &cp, &sched).unwrap();
        let a = 0.5 * h * 2.0;
        assert!((next.w[0] - (1.0 - a) / (1.0 + a)).abs() < 1e-15);
        assert!((next.u[0] - h * (1.0 - a)).abs() < 1e-15);
    }

    #[test]
    fn oversized_step_blows_up() {
        let cp = scalar(1e6);
        let sched = DampingSchedule::undamped();
        let mut s = StateVector::new(0.0, vec![1.0], vec![0.0]);
        let mut st = Stepper::new(&cp, &sched, 1.0, &s.u);
        let mut failed = false;
        for n in 1..2000 {
            if st.advance(&mut s, n as f64).is_err() {
                failed = true;
                break;
            }
        }
        assert!(failed);
    }
}

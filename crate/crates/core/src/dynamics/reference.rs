//! Adaptive Dormand–Prince 5(4) integrator, used only as an accuracy oracle
//! on short horizons.

use crate::model::{CompositePotential, DampingSchedule};

use super::{DynamicsError, StateVector};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (equal to the last row of `A`, first-same-as-last).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const MAX_STEPS: usize = 50_000_000;

/// Solves `y' = rhs(t, y)` from `t0` to `t1` with mixed absolute/relative
/// tolerance `tol` per component.
pub fn dopri5<F>(mut rhs: F, t0: f64, y0: &[f64], t1: f64, tol: f64) -> Result<Vec<f64>, DynamicsError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if !(t1 > t0) || !(tol > 0.0) {
        return Err(DynamicsError::InvalidConfig("reference solver needs t1 > t0 and tol > 0".into()));
    }
    let m = y0.len();
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; m]; 7];
    let mut tmp = vec![0.0; m];
    let mut y5 = vec![0.0; m];
    let mut t = t0;
    let mut h = (1e-3f64).min(t1 - t0);
    rhs(t, &y, &mut k[0]);
    for _ in 0..MAX_STEPS {
        if t >= t1 {
            return Ok(y);
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        for s in 1..7 {
            for i in 0..m {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * A[s][j] * kj[i];
                }
                tmp[i] = acc;
            }
            rhs(t + C[s] * h, &tmp, &mut k[s]);
        }
        let mut err: f64 = 0.0;
        for i in 0..m {
            let mut hi = y[i];
            let mut lo = y[i];
            for s in 0..7 {
                hi += h * B5[s] * k[s][i];
                lo += h * B4[s] * k[s][i];
            }
            y5[i] = hi;
            let scale = tol * (1.0 + y[i].abs().max(hi.abs()));
            err = err.max((hi - lo).abs() / scale);
        }
        if !err.is_finite() {
            return Err(DynamicsError::NonFinite { t });
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            std::mem::swap(&mut y, &mut y5);
            // First-same-as-last: stage 7 is the derivative at the new point.
            let (first, rest) = k.split_at_mut(1);
            first[0].copy_from_slice(&rest[5]);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Err(DynamicsError::InvalidConfig("reference solver exceeded its step budget".into()))
}

/// Reference solution of `u'' + γ(t)u' + Au + f(u) = 0` at `t_end`.
pub fn reference_solution(
    cp: &CompositePotential,
    sched: &DampingSchedule,
    init: &StateVector,
    t_end: f64,
    tol: f64,
) -> Result<StateVector, DynamicsError> {
    let n = cp.dim();
    let mut y0 = init.u.clone();
    y0.extend_from_slice(&init.w);
    let mut grad = vec![0.0; n];
    let y = dopri5(
        |t, y, dy| {
            let (u, w) = y.split_at(n);
            cp.gradient(u, &mut grad);
            let g = sched.gamma(t);
            dy[..n].copy_from_slice(w);
            for i in 0..n {
                dy[n + i] = -g * w[i] - grad[i];
            }
        },
        init.t,
        &y0,
        t_end,
        tol,
    )?;
    let (u, w) = y.split_at(n);
    Ok(StateVector::new(t_end, u.to_vec(), w.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let y = dopri5(|_, y, dy| dy[0] = y[0], 0.0, &[1.0], 2.0, 1e-12).unwrap();
        assert!((y[0] - 2f64.exp()).abs() < 1e-10);
    }

    #[test]
    fn harmonic_rotation() {
        let y = dopri5(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            &[1.0, 0.0],
            10.0,
            1e-11,
        )
        .unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-9);
        assert!((y[1] + 10f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn time_dependent_rhs() {
        // y' = 2t → y = t².
        let y = dopri5(|t, _, dy| dy[0] = 2.0 * t, 1.0, &[1.0], 3.0, 1e-12).unwrap();
        assert!((y[0] - 9.0).abs() < 1e-10);
    }
}

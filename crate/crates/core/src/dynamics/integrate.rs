use crate::model::operator::dot;
use crate::model::{CompositePotential, DampingSchedule};

use super::stepper::{energy, Stepper, SCHEME_NAME};
use super::sum::CompensatedSum;
use super::trajectory::{AccumulatorSnapshot, Sample, Trajectory, TrajectoryMeta};
use super::{DynamicsError, StateVector};

#[derive(Debug, Clone)]
pub struct IntegratorConfig {
    pub h: f64,
    pub t_end: f64,
    /// Geometric sampling ratio (samples at `sample_start·ratio^k`, plus t₀ and t_end).
    pub sample_ratio: f64,
    pub sample_start: f64,
    /// Exponents r of ∫(1+s)^r E(s) ds. Must not contain −1.
    pub energy_exponents: Vec<f64>,
    /// Exponents q of ∫(1+s)^q |u'(s)|² ds.
    pub speed_exponents: Vec<f64>,
    /// Anchor v of p(t) = ½|u(t) − v|²; defaults to the certified minimizer.
    pub anchor: Option<Vec<f64>>,
    /// Gradient-Lipschitz bound L_f of f for the step guard; derived from the
    /// initial energy when absent.
    pub lipschitz_bound: Option<f64>,
    /// Reject `h > h_max`. Disabling it lets oversized steps run into `NonFinite`.
    pub enforce_step_bound: bool,
    pub problem_id: String,
}

impl IntegratorConfig {
    pub fn new(h: f64, t_end: f64) -> Self {
        IntegratorConfig {
            h,
            t_end,
            sample_ratio: 1.05,
            sample_start: 1.0,
            energy_exponents: Vec::new(),
            speed_exponents: Vec::new(),
            anchor: None,
            lipschitz_bound: None,
            enforce_step_bound: true,
            problem_id: "unnamed".into(),
        }
    }

    pub fn energy_exponents(mut self, r: &[f64]) -> Self {
        self.energy_exponents = r.to_vec();
        self
    }

    pub fn speed_exponents(mut self, q: &[f64]) -> Self {
        self.speed_exponents = q.to_vec();
        self
    }

    pub fn problem_id(mut self, id: impl Into<String>) -> Self {
        self.problem_id = id.into();
        self
    }

    pub fn lipschitz_bound(mut self, l: f64) -> Self {
        self.lipschitz_bound = Some(l);
        self
    }

    fn validate(&self, t_start: f64) -> Result<(), DynamicsError> {
        let bad = |m: String| Err(DynamicsError::InvalidConfig(m));
        if !(self.h > 0.0 && self.h.is_finite()) {
            return bad(format!("h must be positive, got {}", self.h));
        }
        if !(self.t_end > t_start && self.t_end.is_finite()) {
            return bad(format!("t_end = {} must exceed the initial time {t_start}", self.t_end));
        }
        if !(self.sample_ratio > 1.0 && self.sample_ratio.is_finite()) {
            return bad(format!("sample_ratio must exceed 1, got {}", self.sample_ratio));
        }
        if !(self.sample_start > 0.0) {
            return bad("sample_start must be positive".into());
        }
        if self.energy_exponents.iter().chain(&self.speed_exponents).any(|r| !r.is_finite()) {
            return bad("accumulator exponents must be finite".into());
        }
        if self.energy_exponents.iter().any(|&r| r == -1.0) {
            return Err(DynamicsError::ExcludedExponent);
        }
        Ok(())
    }

    /// Step indices at which samples are taken: the geometric grid plus every
    /// power of ten inside the run, so decade comparisons hit exact times.
    fn sample_steps(&self, t_start: f64, total: u64) -> Vec<u64> {
        let mut times = Vec::new();
        let mut t = self.sample_start;
        while t < self.t_end {
            times.push(t);
            t *= self.sample_ratio;
        }
        let mut d = 10f64.powf(t_start.max(1.0).log10().floor());
        while d < self.t_end {
            times.push(d);
            d *= 10.0;
        }
        let mut steps: Vec<u64> = times
            .into_iter()
            .filter(|&t| t > t_start)
            .map(|t| ((t - t_start) / self.h).round() as u64)
            .filter(|&n| n > 0 && n < total)
            .collect();
        steps.push(0);
        steps.push(total);
        steps.sort_unstable();
        steps.dedup();
        steps
    }
}

struct Accumulators {
    dissipation: CompensatedSum,
    weighted_energy: Vec<CompensatedSum>,
    weighted_speed: Vec<CompensatedSum>,
    prev_dissipation: f64,
    prev_energy: Vec<f64>,
    prev_speed: Vec<f64>,
    energy_exponents: Vec<f64>,
    speed_exponents: Vec<f64>,
}

impl Accumulators {
    fn new(cfg: &IntegratorConfig, t: f64, gamma: f64, energy: f64, speed_sq: f64) -> Self {
        let mut acc = Accumulators {
            dissipation: CompensatedSum::default(),
            weighted_energy: vec![CompensatedSum::default(); cfg.energy_exponents.len()],
            weighted_speed: vec![CompensatedSum::default(); cfg.speed_exponents.len()],
            prev_dissipation: 0.0,
            prev_energy: vec![0.0; cfg.energy_exponents.len()],
            prev_speed: vec![0.0; cfg.speed_exponents.len()],
            energy_exponents: cfg.energy_exponents.clone(),
            speed_exponents: cfg.speed_exponents.clone(),
        };
        acc.integrands(t, gamma, energy, speed_sq);
        acc
    }

    #[inline]
    fn weight(r: f64, ln1t: f64) -> f64 {
        if r == 0.0 {
            1.0
        } else {
            (r * ln1t).exp()
        }
    }

    /// Stores the integrands at `t` as the left endpoint of the next interval.
    fn integrands(&mut self, t: f64, gamma: f64, energy: f64, speed_sq: f64) {
        let ln1t = (1.0 + t).ln();
        self.prev_dissipation = gamma * speed_sq;
        for (p, r) in self.prev_energy.iter_mut().zip(&self.energy_exponents) {
            *p = Self::weight(*r, ln1t) * energy;
        }
        for (p, q) in self.prev_speed.iter_mut().zip(&self.speed_exponents) {
            *p = Self::weight(*q, ln1t) * speed_sq;
        }
    }

    /// Trapezoidal update over `[t − h, t]`.
    #[inline]
    fn advance(&mut self, h: f64, t: f64, gamma: f64, energy: f64, speed_sq: f64) {
        let half = 0.5 * h;
        let ln1t = (1.0 + t).ln();
        let d = gamma * speed_sq;
        self.dissipation.add(half * (self.prev_dissipation + d));
        self.prev_dissipation = d;
        for ((s, p), r) in self.weighted_energy.iter_mut().zip(self.prev_energy.iter_mut()).zip(&self.energy_exponents) {
            let v = Self::weight(*r, ln1t) * energy;
            s.add(half * (*p + v));
            *p = v;
        }
        for ((s, p), q) in self.weighted_speed.iter_mut().zip(self.prev_speed.iter_mut()).zip(&self.speed_exponents) {
            let v = Self::weight(*q, ln1t) * speed_sq;
            s.add(half * (*p + v));
            *p = v;
        }
    }

    fn snapshot(&self, p: f64, dp: f64) -> AccumulatorSnapshot {
        AccumulatorSnapshot {
            dissipation: self.dissipation.value(),
            weighted_energy: self.weighted_energy.iter().map(CompensatedSum::value).collect(),
            weighted_speed: self.weighted_speed.iter().map(CompensatedSum::value).collect(),
            p,
            dp,
        }
    }
}

fn half_dist_sq(u: &[f64], v: &[f64]) -> f64 {
    0.5 * u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
}

/// Integrates from `init` to `cfg.t_end` with fixed step `cfg.h`, sampling on
/// a geometric grid and accumulating every weighted integral at each step.
pub fn integrate(
    cp: &CompositePotential,
    sched: &DampingSchedule,
    init: &StateVector,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, DynamicsError> {
    let t_start = init.t;
    cfg.validate(t_start)?;
    if !(t_start >= 0.0) {
        return Err(DynamicsError::InvalidConfig(format!("initial time must be ≥ 0, got {t_start}")));
    }
    let n = cp.dim();
    if init.u.len() != n || init.w.len() != n {
        return Err(DynamicsError::InvalidConfig(format!(
            "initial state has dimension {}/{} but the problem has {n}",
            init.u.len(),
            init.w.len()
        )));
    }
    if !init.is_finite() {
        return Err(DynamicsError::NonFinite { t: t_start });
    }
    let e0 = energy(init, cp, sched);
    if cfg.enforce_step_bound {
        let lip = match cfg.lipschitz_bound.or_else(|| cp.lipschitz_bound(e0.energy)) {
            Some(l) => l,
            None => return Err(DynamicsError::InvalidConfig("no gradient-Lipschitz bound for the potential".into())),
        };
        let h_max = cp.h_max(lip);
        if cfg.h > h_max {
            return Err(DynamicsError::StepTooLarge { h: cfg.h, h_max });
        }
    }
    let anchor = cfg.anchor.clone().unwrap_or_else(|| cp.minimizer().to_vec());
    if anchor.len() != n {
        return Err(DynamicsError::InvalidConfig("anchor dimension mismatch".into()));
    }

    let h = cfg.h;
    let total = ((cfg.t_end - t_start) / h).round().max(1.0) as u64;
    let sample_steps = cfg.sample_steps(t_start, total);
    let mut next_sample = 1usize;

    let mut state = init.clone();
    let mut stepper = Stepper::new(cp, sched, h, &state.u);
    let rec0 = stepper.energy_record(&state);
    let mut acc = Accumulators::new(cfg, t_start, rec0.gamma, rec0.energy, rec0.speed_sq);
    let mut p_cur = half_dist_sq(&state.u, &anchor);
    // Exact ṗ(t₀) = ⟨w, u − v⟩ at the initial instant.
    let dp0: f64 = state.w.iter().zip(state.u.iter().zip(&anchor)).map(|(w, (u, v))| w * (u - v)).sum();

    let mut samples = Vec::with_capacity(sample_steps.len());
    samples.push(Sample {
        state: state.clone(),
        record: rec0,
        acc: acc.snapshot(p_cur, dp0),
        p_prev: f64::NAN,
        p_next: f64::NAN,
    });
    let mut pending = Some(0usize);

    for step_idx in 1..=total {
        let t = t_start + step_idx as f64 * h;
        stepper.advance(&mut state, t)?;
        let rec = stepper.energy_record(&state);
        acc.advance(h, t, rec.gamma, rec.energy, rec.speed_sq);
        let p_new = half_dist_sq(&state.u, &anchor);
        if let Some(k) = pending.take() {
            samples[k].p_next = p_new;
        }
        let p_before = p_cur;
        p_cur = p_new;
        if next_sample < sample_steps.len() && step_idx == sample_steps[next_sample] {
            next_sample += 1;
            samples.push(Sample {
                state: state.clone(),
                record: rec,
                acc: acc.snapshot(p_cur, (p_cur - p_before) / h),
                p_prev: p_before,
                p_next: f64::NAN,
            });
            pending = Some(samples.len() - 1);
        }
    }
    if let Some(k) = pending {
        // One look-ahead step so the final sample also has a centred triplet.
        let mut peek = state.clone();
        let t = t_start + (total + 1) as f64 * h;
        if stepper.advance(&mut peek, t).is_ok() {
            samples[k].p_next = half_dist_sq(&peek.u, &anchor);
        }
    }
    debug_assert!(samples.len() == sample_steps.len());
    debug_assert!(dot(&state.w, &state.w).is_finite());

    Ok(Trajectory {
        meta: TrajectoryMeta {
            problem_id: cfg.problem_id.clone(),
            scheme: SCHEME_NAME.into(),
            h,
            t_end: t_start + total as f64 * h,
            sample_ratio: cfg.sample_ratio,
            energy_exponents: cfg.energy_exponents.clone(),
            speed_exponents: cfg.speed_exponents.clone(),
            anchor,
            schedule: format!("{:?}", sched.kind),
        },
        samples,
    })
}

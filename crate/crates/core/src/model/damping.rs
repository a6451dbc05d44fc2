use std::fmt;
use std::sync::Arc;

use super::ModelError;

pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Relative slack for the pointwise hypothesis comparisons; absorbs rounding
/// in user-supplied closures without admitting genuinely weaker schedules.
const REL_SLACK: f64 = 1e-12;

#[derive(Clone)]
pub enum DampingKind {
    /// γ(t) = K / (1+t)^α
    PowerLaw { k: f64, alpha: f64 },
    Constant { c: f64 },
    /// γ ≡ 0. Control runs only: satisfies none of the decay hypotheses.
    Undamped,
    Custom { gamma: TimeFn, derivative: Option<TimeFn> },
}

impl fmt::Debug for DampingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DampingKind::PowerLaw { k, alpha } => write!(f, "PowerLaw {{ k: {k}, alpha: {alpha} }}"),
            DampingKind::Constant { c } => write!(f, "Constant {{ c: {c} }}"),
            DampingKind::Undamped => write!(f, "Undamped"),
            DampingKind::Custom { derivative, .. } => {
                write!(f, "Custom {{ derivative: {} }}", derivative.is_some())
            }
        }
    }
}

/// Friction coefficient γ(t) together with the onset time of the derivative
/// condition.
#[derive(Debug, Clone)]
pub struct DampingSchedule {
    pub kind: DampingKind,
    pub t0: f64,
}

/// Result of testing `γ(t) ≥ K/(1+t)^α` on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisCheck {
    pub holds: bool,
    /// `min over grid of γ(t)(1+t)^α`: the largest K the grid admits for this α.
    pub max_admissible_k: f64,
}

impl DampingSchedule {
    pub fn power_law(k: f64, alpha: f64) -> Result<Self, ModelError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(ModelError::InvalidParameter { name: "K", reason: format!("must be positive, got {k}") });
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(ModelError::InvalidParameter { name: "alpha", reason: format!("must lie in [0,1), got {alpha}") });
        }
        Ok(DampingSchedule { kind: DampingKind::PowerLaw { k, alpha }, t0: 0.0 })
    }

    pub fn constant(c: f64) -> Result<Self, ModelError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(ModelError::InvalidParameter { name: "c", reason: format!("must be positive, got {c}") });
        }
        Ok(DampingSchedule { kind: DampingKind::Constant { c }, t0: 0.0 })
    }

    pub fn undamped() -> Self {
        DampingSchedule { kind: DampingKind::Undamped, t0: 0.0 }
    }

    pub fn custom(
        gamma: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: Option<TimeFn>,
    ) -> Self {
        DampingSchedule { kind: DampingKind::Custom { gamma: Arc::new(gamma), derivative }, t0: 0.0 }
    }

    pub fn with_onset(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }

    #[inline]
    pub fn gamma(&self, t: f64) -> f64 {
        match &self.kind {
            DampingKind::PowerLaw { k, alpha } => power_law(*k, *alpha, t),
            DampingKind::Constant { c } => *c,
            DampingKind::Undamped => 0.0,
            DampingKind::Custom { gamma, .. } => gamma(t),
        }
    }

    /// γ′(t), when available.
    pub fn derivative(&self, t: f64) -> Option<f64> {
        match &self.kind {
            DampingKind::PowerLaw { alpha, .. } => Some(-alpha * self.gamma(t) / (1.0 + t)),
            DampingKind::Constant { .. } | DampingKind::Undamped => Some(0.0),
            DampingKind::Custom { derivative, .. } => derivative.as_ref().map(|d| d(t)),
        }
    }

    /// Decay exponent of a power-law schedule.
    pub fn alpha(&self) -> Option<f64> {
        match self.kind {
            DampingKind::PowerLaw { alpha, .. } => Some(alpha),
            DampingKind::Constant { .. } => Some(0.0),
            _ => None,
        }
    }

    /// Positivity and monotonicity on `grid`. Undamped schedules fail the
    /// positivity test; custom schedules without γ′ are checked by differences.
    pub fn validate(&self, grid: &[f64]) -> Result<(), ModelError> {
        for &t in grid {
            let g = self.gamma(t);
            if !(g > 0.0 && g.is_finite()) {
                return Err(ModelError::InvalidParameter { name: "gamma", reason: format!("γ({t}) = {g} is not positive") });
            }
            if let Some(d) = self.derivative(t) {
                if d > 0.0 {
                    return Err(ModelError::InvalidParameter { name: "gamma", reason: format!("γ′({t}) = {d} > 0") });
                }
            }
        }
        for pair in grid.windows(2) {
            if self.gamma(pair[1]) > self.gamma(pair[0]) * (1.0 + REL_SLACK) {
                return Err(ModelError::InvalidParameter {
                    name: "gamma",
                    reason: format!("γ increases between {} and {}", pair[0], pair[1]),
                });
            }
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn power_law(k: f64, alpha: f64, t: f64) -> f64 {
    k * (1.0 + t).powf(-alpha)
}

/// Tests `γ(t) ≥ K/(1+t)^α` at every grid point.
pub fn check_damping_hypothesis(sched: &DampingSchedule, k: f64, alpha: f64, grid: &[f64]) -> HypothesisCheck {
    let mut holds = true;
    let mut max_k = f64::INFINITY;
    for &t in grid {
        let g = sched.gamma(t);
        let bound = power_law(k, alpha, t);
        if g < bound * (1.0 - REL_SLACK) {
            holds = false;
        }
        max_k = max_k.min(g * (1.0 + t).powf(alpha));
    }
    HypothesisCheck { holds, max_admissible_k: max_k }
}

/// Tests `γ′(t) ≤ −α γ(t)/(1+t)` at grid points `t ≥ t0`.
pub fn check_derivative_condition(sched: &DampingSchedule, alpha: f64, t0: f64, grid: &[f64]) -> Result<bool, ModelError> {
    for &t in grid.iter().filter(|&&t| t >= t0) {
        let d = sched.derivative(t).ok_or(ModelError::MissingDerivative)?;
        let bound = -alpha * sched.gamma(t) / (1.0 + t);
        // bound ≤ 0, so the slack loosens it towards zero.
        if d > bound * (1.0 - REL_SLACK) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Geometric grid `start·ratio^k` up to `end`, prefixed with 0.
pub fn geometric_grid(start: f64, end: f64, ratio: f64) -> Vec<f64> {
    let mut grid = vec![0.0];
    let mut t = start;
    while t <= end {
        grid.push(t);
        t *= ratio;
    }
    grid
}

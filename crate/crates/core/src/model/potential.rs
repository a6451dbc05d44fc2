use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::ModelError;

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// Convex C¹ potential `F` with gradient `f`.
///
/// Built-in kinds act coordinate-wise with a per-coordinate weight; a zero
/// weight leaves that coordinate flat.
#[derive(Clone)]
pub enum PotentialKind {
    Zero,
    /// `F(u) = Σ wᵢ (uᵢ − cᵢ)⁴ / 4`
    Quartic { shift: Vec<f64>, weights: Vec<f64> },
    /// `F(u) = Σ wᵢ log cosh(uᵢ − cᵢ)`
    LogCosh { shift: Vec<f64>, weights: Vec<f64> },
    Custom {
        value: ScalarFn,
        gradient: GradientFn,
        /// Global Lipschitz bound of the gradient, when known.
        lipschitz: Option<f64>,
    },
}

impl fmt::Debug for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialKind::Zero => write!(f, "Zero"),
            PotentialKind::Quartic { shift, weights } => {
                f.debug_struct("Quartic").field("shift", shift).field("weights", weights).finish()
            }
            PotentialKind::LogCosh { shift, weights } => {
                f.debug_struct("LogCosh").field("shift", shift).field("weights", weights).finish()
            }
            PotentialKind::Custom { lipschitz, .. } => {
                f.debug_struct("Custom").field("lipschitz", lipschitz).finish_non_exhaustive()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub convexity_witness: String,
}

impl PotentialSpec {
    pub fn zero() -> Self {
        PotentialSpec { kind: PotentialKind::Zero, convexity_witness: "identically zero".into() }
    }

    pub fn quartic(shift: Vec<f64>, weights: Vec<f64>) -> Result<Self, ModelError> {
        check_coordinatewise(&shift, &weights)?;
        Ok(PotentialSpec {
            kind: PotentialKind::Quartic { shift, weights },
            convexity_witness: "sum of nonnegatively weighted even quartics".into(),
        })
    }

    /// Quartic with the same weight on every coordinate.
    pub fn quartic_uniform(shift: Vec<f64>, weight: f64) -> Result<Self, ModelError> {
        let weights = vec![weight; shift.len()];
        Self::quartic(shift, weights)
    }

    pub fn log_cosh(shift: Vec<f64>, weights: Vec<f64>) -> Result<Self, ModelError> {
        check_coordinatewise(&shift, &weights)?;
        Ok(PotentialSpec {
            kind: PotentialKind::LogCosh { shift, weights },
            convexity_witness: "log cosh is convex (second derivative sech² ≥ 0)".into(),
        })
    }

    pub fn custom(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
        lipschitz: Option<f64>,
        convexity_witness: impl Into<String>,
    ) -> Self {
        PotentialSpec {
            kind: PotentialKind::Custom { value: Arc::new(value), gradient: Arc::new(gradient), lipschitz },
            convexity_witness: convexity_witness.into(),
        }
    }

    /// Dimension fixed by the parameters, `None` for kinds valid in any dimension.
    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            PotentialKind::Quartic { shift, .. } | PotentialKind::LogCosh { shift, .. } => Some(shift.len()),
            _ => None,
        }
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::Quartic { shift, weights } => u
                .iter()
                .zip(shift)
                .zip(weights)
                .map(|((x, c), w)| {
                    let d = x - c;
                    let d2 = d * d;
                    0.25 * w * d2 * d2
                })
                .sum(),
            PotentialKind::LogCosh { shift, weights } => {
                u.iter().zip(shift).zip(weights).map(|((x, c), w)| w * log_cosh(x - c)).sum()
            }
            PotentialKind::Custom { value, .. } => value(u),
        }
    }

    /// `out = f(u)`.
    pub fn gradient(&self, u: &[f64], out: &mut [f64]) {
        match &self.kind {
            PotentialKind::Zero => out.iter_mut().for_each(|o| *o = 0.0),
            PotentialKind::Quartic { shift, weights } => {
                for (((o, x), c), w) in out.iter_mut().zip(u).zip(shift).zip(weights) {
                    let d = x - c;
                    *o = w * d * d * d;
                }
            }
            PotentialKind::LogCosh { shift, weights } => {
                for (((o, x), c), w) in out.iter_mut().zip(u).zip(shift).zip(weights) {
                    *o = w * (x - c).tanh();
                }
            }
            PotentialKind::Custom { gradient, .. } => gradient(u, out),
        }
    }

    /// Gradient-Lipschitz bound valid on `{u : F(u) − inf F ≤ level}`.
    ///
    /// Quartic terms satisfy `wᵢ dᵢ⁴/4 ≤ level` there, so `3wᵢdᵢ² ≤ 6√(wᵢ·level)`.
    pub fn lipschitz_on_sublevel(&self, level: f64) -> Option<f64> {
        match &self.kind {
            PotentialKind::Zero => Some(0.0),
            PotentialKind::Quartic { weights, .. } => {
                let level = level.max(0.0);
                Some(weights.iter().map(|w| 6.0 * (w * level).sqrt()).fold(0.0, f64::max))
            }
            PotentialKind::LogCosh { weights, .. } => Some(weights.iter().copied().fold(0.0, f64::max)),
            PotentialKind::Custom { lipschitz, .. } => *lipschitz,
        }
    }

    /// Coordinates along which `F` is constant. Custom potentials report none.
    pub fn flat_coordinates(&self, n: usize) -> Vec<bool> {
        match &self.kind {
            PotentialKind::Zero => vec![true; n],
            PotentialKind::Quartic { weights, .. } | PotentialKind::LogCosh { weights, .. } => {
                weights.iter().map(|&w| w == 0.0).collect()
            }
            PotentialKind::Custom { .. } => vec![false; n],
        }
    }

    /// Point where every built-in term vanishes, a natural starting guess for
    /// the minimizer search.
    pub fn center(&self, n: usize) -> Vec<f64> {
        match &self.kind {
            PotentialKind::Quartic { shift, .. } | PotentialKind::LogCosh { shift, .. } => shift.clone(),
            _ => vec![0.0; n],
        }
    }

    /// Lower bound of `F` (0 for built-ins).
    pub fn infimum(&self) -> Option<f64> {
        match &self.kind {
            PotentialKind::Custom { .. } => None,
            _ => Some(0.0),
        }
    }
}

fn check_coordinatewise(shift: &[f64], weights: &[f64]) -> Result<(), ModelError> {
    if shift.len() != weights.len() {
        return Err(ModelError::DimensionMismatch { expected: shift.len(), found: weights.len() });
    }
    if shift.iter().chain(weights).any(|v| !v.is_finite()) {
        return Err(ModelError::NonFinite("potential parameters"));
    }
    if weights.iter().any(|&w| w < 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "weights",
            reason: "a negative weight breaks convexity".into(),
        });
    }
    Ok(())
}

fn log_cosh(x: f64) -> f64 {
    // Stable for large |x|: log cosh x = |x| + log(1 + e^{-2|x|}) − log 2.
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Central-difference defect `|(F(x+hd) − F(x−hd))/(2h) − ⟨f(x), d⟩|`.
pub fn gradient_fd_defect(pot: &PotentialSpec, x: &[f64], d: &[f64], h: f64) -> f64 {
    let plus: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + h * b).collect();
    let minus: Vec<f64> = x.iter().zip(d).map(|(a, b)| a - h * b).collect();
    let fd = (pot.value(&plus) - pot.value(&minus)) / (2.0 * h);
    let mut g = vec![0.0; x.len()];
    pot.gradient(x, &mut g);
    let directional: f64 = g.iter().zip(d).map(|(a, b)| a * b).sum();
    (fd - directional).abs()
}

/// Randomized midpoint-convexity probe; returns the worst excess
/// `F((x+y)/2) − (F(x)+F(y))/2` seen (≤ 0 for convex `F`).
pub fn midpoint_convexity_excess<R: Rng>(pot: &PotentialSpec, n: usize, radius: f64, probes: usize, rng: &mut R) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..probes {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-radius..radius)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-radius..radius)).collect();
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
        let excess = pot.value(&mid) - 0.5 * (pot.value(&x) + pot.value(&y));
        worst = worst.max(excess);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn builtins(n: usize) -> Vec<PotentialSpec> {
        let shift: Vec<f64> = (0..n).map(|i| 0.3 * i as f64 - 0.5).collect();
        let weights: Vec<f64> = (0..n).map(|i| 0.5 + i as f64).collect();
        vec![
            PotentialSpec::zero(),
            PotentialSpec::quartic(shift.clone(), weights.clone()).unwrap(),
            PotentialSpec::log_cosh(shift, weights).unwrap(),
        ]
    }

    #[test]
    fn gradient_matches_central_differences_at_second_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 4;
        for pot in builtins(n) {
            for _ in 0..100 {
                let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
                let d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let e1 = gradient_fd_defect(&pot, &x, &d, 1e-2);
                let e2 = gradient_fd_defect(&pot, &x, &d, 5e-3);
                // Either already at rounding level, or the error quarters.
                if e1 > 1e-9 {
                    let ratio = e1 / e2;
                    assert!((3.0..5.0).contains(&ratio), "{pot:?}: ratio {ratio}");
                }
            }
        }
    }

    #[test]
    fn builtins_are_midpoint_convex() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for pot in builtins(3) {
            assert!(midpoint_convexity_excess(&pot, 3, 5.0, 500, &mut rng) <= 1e-12);
        }
    }

    #[test]
    fn custom_nonconvex_is_caught() {
        let pot = PotentialSpec::custom(
            |u| -u[0] * u[0],
            |u, g| g[0] = -2.0 * u[0],
            None,
            "deliberately concave",
        );
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(midpoint_convexity_excess(&pot, 1, 1.0, 50, &mut rng) > 0.0);
    }

    #[test]
    fn log_cosh_is_stable_far_out() {
        assert!((log_cosh(800.0) - (800.0 - std::f64::consts::LN_2)).abs() < 1e-12);
        assert_eq!(log_cosh(0.0), 0.0);
    }

    #[test]
    fn negative_weight_rejected() {
        assert!(PotentialSpec::quartic(vec![0.0], vec![-1.0]).is_err());
        assert!(PotentialSpec::quartic(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn quartic_sublevel_lipschitz_bound_holds() {
        let pot = PotentialSpec::quartic(vec![1.0], vec![2.0]).unwrap();
        let level = 3.0;
        let bound = pot.lipschitz_on_sublevel(level).unwrap();
        // Edge of the sublevel set: 2·d⁴/4 = level.
        let d = (4.0 * level / 2.0f64).powf(0.25);
        let curvature = 3.0 * 2.0 * d * d;
        assert!(curvature <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn flat_coordinates_follow_zero_weights() {
        let pot = PotentialSpec::quartic(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(pot.flat_coordinates(2), vec![false, true]);
        assert_eq!(PotentialSpec::zero().flat_coordinates(3), vec![true; 3]);
    }
}

//! Certified test problems: scalar oscillators, the semi-discretized damped
//! wave equation (linear and semilinear), and degenerate problems whose
//! minimizer set is a line.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::{energy, StateVector};
use crate::model::{CompositePotential, DampingSchedule, ModelError, OperatorSpec, PotentialSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeTag {
    StronglyConvex,
    SemiCoerciveDegenerate,
    WaveDiscretization,
    FlatDirections,
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegimeTag::StronglyConvex => "strongly-convex",
            RegimeTag::SemiCoerciveDegenerate => "semi-coercive-degenerate",
            RegimeTag::WaveDiscretization => "wave-discretization",
            RegimeTag::FlatDirections => "flat-directions",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub id: String,
    pub init: StateVector,
    /// Certified operator and potential with their minimizer data.
    pub certified: CompositePotential,
    pub notes: Vec<RegimeTag>,
}

impl ProblemSpec {
    /// Certifies `op` + `pot` and checks `init` against the dimension.
    pub fn new(
        id: impl Into<String>,
        op: OperatorSpec,
        pot: PotentialSpec,
        init: StateVector,
        notes: Vec<RegimeTag>,
    ) -> Result<Self, ModelError> {
        let certified = CompositePotential::certify(op, pot)?;
        Self::from_certified(id, certified, init, notes)
    }

    pub fn from_certified(
        id: impl Into<String>,
        certified: CompositePotential,
        init: StateVector,
        notes: Vec<RegimeTag>,
    ) -> Result<Self, ModelError> {
        let n = certified.dim();
        for len in [init.u.len(), init.w.len()] {
            if len != n {
                return Err(ModelError::DimensionMismatch { expected: n, found: len });
            }
        }
        if !init.is_finite() {
            return Err(ModelError::NonFinite("initial state"));
        }
        Ok(ProblemSpec { id: id.into(), init, certified, notes })
    }

    pub fn op(&self) -> &OperatorSpec {
        &self.certified.op
    }

    pub fn pot(&self) -> &PotentialSpec {
        &self.certified.pot
    }

    pub fn dim(&self) -> usize {
        self.certified.dim()
    }

    pub fn has_tag(&self, tag: RegimeTag) -> bool {
        self.notes.contains(&tag)
    }

    /// Initial energy (the schedule only enters the record's γ field).
    pub fn initial_energy(&self) -> f64 {
        energy(&self.init, &self.certified, &DampingSchedule::undamped()).energy
    }

    /// Gradient-Lipschitz bound of `f` on the initial energy sublevel set.
    pub fn lipschitz_bound(&self) -> Option<f64> {
        self.certified.lipschitz_bound(self.initial_energy())
    }

    /// Largest admissible step `0.5/√(‖A‖ + L_f)`.
    pub fn h_max(&self) -> Option<f64> {
        self.lipschitz_bound().map(|l| self.certified.h_max(l))
    }

    pub fn with_init(mut self, init: StateVector) -> Result<Self, ModelError> {
        let id = std::mem::take(&mut self.id);
        Self::from_certified(id, self.certified, init, self.notes)
    }
}

/// Per-node potential for [`build_wave_problem`], before scaling by Δx.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NodalPotential {
    Zero,
    Quartic { weight: f64, shift: f64 },
    LogCosh { weight: f64, shift: f64 },
}

/// Dirichlet Laplacian `A = tridiag(−1, 2, −1)/Δx²` on `n` interior nodes of
/// `(0, L)`, `Δx = L/(n+1)`, with the nodal potential scaled by Δx. The
/// initial state is the first sine mode at rest.
pub fn build_wave_problem(n: usize, length: f64, nodal: NodalPotential) -> Result<ProblemSpec, ModelError> {
    if n < 2 {
        return Err(ModelError::BadDimension { rows: n, cols: n });
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(ModelError::InvalidParameter { name: "length", reason: format!("must be positive, got {length}") });
    }
    let dx = length / (n + 1) as f64;
    let op = OperatorSpec::new(dirichlet_laplacian(n, dx), 0.0)?;
    let (pot, mut notes) = match nodal {
        NodalPotential::Zero => (PotentialSpec::zero(), vec![]),
        NodalPotential::Quartic { weight, shift } => {
            (PotentialSpec::quartic(vec![shift; n], vec![weight * dx; n])?, vec![])
        }
        NodalPotential::LogCosh { weight, shift } => {
            (PotentialSpec::log_cosh(vec![shift; n], vec![weight * dx; n])?, vec![])
        }
    };
    notes.extend([RegimeTag::WaveDiscretization, RegimeTag::StronglyConvex]);
    let init = StateVector::at_rest(sine_mode(n, length, 1));
    let id = match nodal {
        NodalPotential::Zero => format!("wave-{n}"),
        NodalPotential::Quartic { .. } => format!("semilinear-wave-{n}"),
        NodalPotential::LogCosh { .. } => format!("logcosh-wave-{n}"),
    };
    ProblemSpec::new(id, op, pot, init, notes)
}

fn dirichlet_laplacian(n: usize, dx: f64) -> DMatrix<f64> {
    let s = 1.0 / (dx * dx);
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * s
        } else if i.abs_diff(j) == 1 {
            -s
        } else {
            0.0
        }
    })
}

/// `sin(kπx_i/L)` at the interior nodes.
fn sine_mode(n: usize, length: f64, k: usize) -> Vec<f64> {
    let dx = length / (n + 1) as f64;
    (1..=n).map(|i| (k as f64 * PI * i as f64 * dx / length).sin()).collect()
}

/// The built-in problems, in a fixed order.
pub fn catalog() -> Vec<ProblemSpec> {
    CATALOG_IDS.iter().map(|id| problem(id).expect("catalog entries certify")).collect()
}

pub const CATALOG_IDS: [&str; 6] =
    ["scalar-harmonic", "dirichlet-wave-20", "semilinear-wave-20", "degenerate-flat", "far-start", "kernel-quartic"];

/// Looks a catalog problem up by id.
pub fn problem(id: &str) -> Option<ProblemSpec> {
    let built = match id {
        "scalar-harmonic" => ProblemSpec::new(
            id,
            OperatorSpec::identity(1).ok()?,
            PotentialSpec::zero(),
            StateVector::at_rest(vec![1.0]),
            vec![RegimeTag::StronglyConvex],
        ),
        "dirichlet-wave-20" => build_wave_problem(20, 1.0, NodalPotential::Zero).and_then(|p| {
            // Nonzero initial velocity exercises the kinetic part of E.
            let init = StateVector::new(0.0, p.init.u.clone(), sine_mode(20, 1.0, 2).iter().map(|v| 2.0 * v).collect());
            p.with_init(init)
        }),
        "semilinear-wave-20" => build_wave_problem(20, 1.0, NodalPotential::Quartic { weight: 1.0, shift: 0.0 }),
        "degenerate-flat" => ProblemSpec::new(
            id,
            OperatorSpec::with_certificate(DMatrix::from_diagonal(&nalgebra::dvector![1.0, 0.0]), 1.0, 1.0).ok()?,
            PotentialSpec::quartic(vec![0.0, 0.0], vec![1.0, 0.0]).ok()?,
            StateVector::new(0.0, vec![1.0, 0.5], vec![0.0, 0.05]),
            vec![RegimeTag::SemiCoerciveDegenerate, RegimeTag::FlatDirections],
        ),
        "far-start" => build_wave_problem(20, 1.0, NodalPotential::Quartic { weight: 1.0, shift: 0.0 }).and_then(|p| {
            let u = p.init.u.clone();
            let scale = 100.0 / u.iter().map(|x| x * x).sum::<f64>().sqrt();
            p.with_init(StateVector::at_rest(u.iter().map(|x| x * scale).collect()))
        }),
        "kernel-quartic" => ProblemSpec::new(
            id,
            OperatorSpec::with_certificate(DMatrix::from_diagonal(&nalgebra::dvector![1.0, 0.0]), 1.0, 1.0).ok()?,
            PotentialSpec::quartic(vec![0.0, 0.0], vec![0.0, 1.0]).ok()?,
            StateVector::at_rest(vec![1.0, 1.0]),
            vec![RegimeTag::SemiCoerciveDegenerate],
        ),
        _ => return None,
    };
    built.ok().map(|mut p| {
        p.id = id.to_string();
        p
    })
}

/// Custom problem description: dense row-major matrix, potential kind with
/// per-coordinate parameters, initial vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomProblem {
    pub id: String,
    pub matrix: Vec<Vec<f64>>,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub mu: Option<f64>,
    pub potential: CustomPotential,
    pub u0: Vec<f64>,
    #[serde(default)]
    pub w0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CustomPotential {
    Zero,
    Quartic { shift: Vec<f64>, weights: Vec<f64> },
    LogCosh { shift: Vec<f64>, weights: Vec<f64> },
}

impl CustomProblem {
    pub fn build(&self) -> Result<ProblemSpec, ModelError> {
        let n = self.matrix.len();
        if n == 0 || self.matrix.iter().any(|row| row.len() != n) {
            let cols = self.matrix.first().map_or(0, Vec::len);
            return Err(ModelError::BadDimension { rows: n, cols });
        }
        let m = DMatrix::from_fn(n, n, |i, j| self.matrix[i][j]);
        let op = match self.mu {
            Some(mu) => OperatorSpec::with_certificate(m, self.lambda, mu)?,
            None => OperatorSpec::new(m, self.lambda)?,
        };
        let pot = match &self.potential {
            CustomPotential::Zero => PotentialSpec::zero(),
            CustomPotential::Quartic { shift, weights } => PotentialSpec::quartic(shift.clone(), weights.clone())?,
            CustomPotential::LogCosh { shift, weights } => PotentialSpec::log_cosh(shift.clone(), weights.clone())?,
        };
        let w0 = self.w0.clone().unwrap_or_else(|| vec![0.0; self.u0.len()]);
        let mut notes = Vec::new();
        if op.smallest_eig() > op.spectral_slack() {
            notes.push(RegimeTag::StronglyConvex);
        } else {
            notes.push(RegimeTag::SemiCoerciveDegenerate);
        }
        let spec = ProblemSpec::new(self.id.clone(), op, pot, StateVector::new(0.0, self.u0.clone(), w0), notes)?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_semi_coercivity;

    #[test]
    fn catalog_certifies() {
        let cat = catalog();
        assert!(cat.len() >= 5);
        for p in &cat {
            let cert = validate_semi_coercivity(p.op()).unwrap();
            assert!(cert.mu > 0.0, "{}", p.id);
            assert!(p.certified.gradient_norm(p.certified.minimizer()) <= p.certified.critical_tolerance());
            assert!(p.init.is_finite());
            assert!(p.h_max().unwrap() > 5e-3, "{} h_max {:?}", p.id, p.h_max());
        }
        let ids: Vec<&str> = cat.iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, CATALOG_IDS);
        assert!(cat.iter().any(|p| p.init.w.iter().any(|w| *w != 0.0)));
    }

    #[test]
    fn dirichlet_spectrum() {
        let p = problem("dirichlet-wave-20").unwrap();
        let h: f64 = 1.0 / 21.0;
        let expected = 2.0 / (h * h) * (1.0 - (PI / 21.0).cos());
        assert!((p.op().smallest_eig() - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn degenerate_flat_is_semi_coercive() {
        let p = problem("degenerate-flat").unwrap();
        assert_eq!(p.op().smallest_eig(), 0.0);
        let cert = validate_semi_coercivity(p.op()).unwrap();
        assert_eq!((cert.lambda, cert.mu), (1.0, 1.0));
        assert_eq!(p.certified.argmin_basis().len(), 1);
        assert!(p.certified.argmin_basis()[0][1].abs() == 1.0);
    }

    #[test]
    fn far_start_norm() {
        let p = problem("far-start").unwrap();
        let norm = p.init.u.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 100.0).abs() < 1e-10);
    }

    #[test]
    fn two_node_wave() {
        let p = build_wave_problem(2, 3.0, NodalPotential::Zero).unwrap();
        assert_eq!(p.op().matrix(), &DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]));
        assert!((p.op().smallest_eig() - 1.0).abs() < 1e-12);
        assert!((p.op().norm() - 3.0).abs() < 1e-12);
        assert_eq!(
            build_wave_problem(1, 1.0, NodalPotential::Zero).unwrap_err(),
            ModelError::BadDimension { rows: 1, cols: 1 }
        );
    }

    #[test]
    fn quartic_wave_minimizers() {
        let p = build_wave_problem(20, 1.0, NodalPotential::Quartic { weight: 1.0, shift: 0.0 }).unwrap();
        assert!(p.certified.minimizer().iter().all(|x| x.abs() < 1e-6));
        assert!(p.certified.min_phi().abs() < 1e-12);

        let p = build_wave_problem(20, 1.0, NodalPotential::Quartic { weight: 1.0, shift: 1.0 }).unwrap();
        assert!(p.certified.gradient_norm(p.certified.minimizer()) <= 1e-9 * (1.0 + p.op().norm()));
        // Independent check: Newton iteration on Au + Δx(u−1)³ = 0.
        let n = 20;
        let dx = 1.0 / 21.0;
        let a = p.op().matrix().clone();
        let mut u = nalgebra::DVector::from_element(n, 0.5);
        for _ in 0..50 {
            let r = &a * &u + u.map(|x| dx * (x - 1.0).powi(3));
            let jac = &a + DMatrix::from_diagonal(&u.map(|x| 3.0 * dx * (x - 1.0).powi(2)));
            u -= jac.lu().solve(&r).unwrap();
        }
        let diff = u.iter().zip(p.certified.minimizer()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-7, "{diff}");
    }

    #[test]
    fn custom_problem_from_toml() {
        let text = r#"
id = "two-spring"
matrix = [[2.0, -1.0], [-1.0, 2.0]]
u0 = [1.0, 0.0]

[potential]
kind = "quartic"
shift = [0.0, 0.0]
weights = [1.0, 1.0]
"#;
        let cp: CustomProblem = toml::from_str(text).unwrap();
        let p = cp.build().unwrap();
        assert_eq!(p.id, "two-spring");
        assert_eq!(p.init.w, vec![0.0, 0.0]);
        assert!(p.has_tag(RegimeTag::StronglyConvex));

        let ragged: CustomProblem = toml::from_str(&text.replace("[-1.0, 2.0]", "[-1.0]")).unwrap();
        assert!(matches!(ragged.build(), Err(ModelError::BadDimension { .. })));
    }
}

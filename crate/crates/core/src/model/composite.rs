use nalgebra::{DMatrix, SymmetricEigen};

use super::operator::{dot, OperatorSpec};
use super::potential::{PotentialKind, PotentialSpec};
use super::ModelError;

/// Iteration budget for the accelerated minimizer search.
pub const MAX_DESCENT_ITERS: usize = 200_000;

/// Minimizer data for `φ(v) = ½⟨Av,v⟩ + F(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimizerData {
    pub minimizer: Vec<f64>,
    pub min_phi: f64,
    /// Orthonormal basis of the flat directions of `argmin φ` through the minimizer.
    pub argmin_basis: Vec<Vec<f64>>,
    pub gradient_norm: f64,
    pub iterations: usize,
}

/// Critical-point tolerance ε_crit = 1e−9·(1 + ‖A‖).
pub fn critical_tolerance(op: &OperatorSpec) -> f64 {
    1e-9 * (1.0 + op.norm())
}

/// Finds a point of `argmin φ` and the flat subspace through it.
///
/// Zero potentials are handled in closed form (the origin solves `Au = 0`);
/// everything else goes through Nesterov descent with backtracking and
/// function-value restarts, stopped on `‖∇φ‖ ≤ ε_crit`.
pub fn minimize_phi(op: &OperatorSpec, pot: &PotentialSpec) -> Result<MinimizerData, ModelError> {
    let n = op.dim();
    if let Some(m) = pot.dim() {
        if m != n {
            return Err(ModelError::DimensionMismatch { expected: n, found: m });
        }
    }
    let basis = argmin_flat_basis(op, pot);
    if matches!(pot.kind, PotentialKind::Zero) {
        return Ok(MinimizerData {
            minimizer: vec![0.0; n],
            min_phi: 0.0,
            argmin_basis: basis,
            gradient_norm: 0.0,
            iterations: 0,
        });
    }

    let tol = critical_tolerance(op);
    let phi = |x: &[f64]| 0.5 * op.quadratic_form(x) + pot.value(x);
    let grad = |x: &[f64], g: &mut [f64]| {
        let mut fx = vec![0.0; n];
        op.apply(x, g);
        pot.gradient(x, &mut fx);
        g.iter_mut().zip(&fx).for_each(|(a, b)| *a += b);
    };

    let mut x = pot.center(n);
    let mut g = vec![0.0; n];
    grad(&x, &mut g);
    let mut gnorm = norm(&g);
    if gnorm <= tol {
        return Ok(MinimizerData { min_phi: phi(&x), minimizer: x, argmin_basis: basis, gradient_norm: gnorm, iterations: 0 });
    }

    let mut lip = op.norm().max(1e-8);
    let mut x_prev = x.clone();
    let mut y = x.clone();
    let mut momentum = 1.0f64;
    let mut g_trial = vec![0.0; n];
    for iter in 1..=MAX_DESCENT_ITERS {
        grad(&y, &mut g);
        // Backtracking on the local gradient-Lipschitz estimate. Comparing
        // gradients rather than function values stays meaningful once φ
        // differences drop below rounding.
        loop {
            for i in 0..n {
                x[i] = y[i] - g[i] / lip;
            }
            grad(&x, &mut g_trial);
            let dg: f64 = g_trial.iter().zip(&g).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            // ‖∇φ(x) − ∇φ(y)‖ ≤ lip·‖x − y‖ with ‖x − y‖ = ‖g‖/lip.
            if dg <= norm(&g) || lip > 1e300 {
                break;
            }
            lip *= 2.0;
        }
        gnorm = norm(&g_trial);
        if gnorm <= tol {
            return Ok(MinimizerData { min_phi: phi(&x), minimizer: x, argmin_basis: basis, gradient_norm: gnorm, iterations: iter });
        }
        if !gnorm.is_finite() {
            break;
        }
        // Gradient restart: drop momentum once it points uphill.
        let uphill: f64 = g.iter().zip(x.iter().zip(&x_prev)).map(|(gi, (a, b))| gi * (a - b)).sum();
        if uphill > 0.0 {
            momentum = 1.0;
        }
        let next = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
        let beta = (momentum - 1.0) / next;
        for i in 0..n {
            y[i] = x[i] + beta * (x[i] - x_prev[i]);
        }
        momentum = next;
        x_prev.copy_from_slice(&x);
        // Mild decrease lets the step recover after a stiff region.
        lip *= 0.95;
    }
    Err(ModelError::NoConvergence { iterations: MAX_DESCENT_ITERS, gradient_norm: gnorm })
}

/// `ker A ∩ span{eᵢ : F flat along eᵢ}`, orthonormalized.
pub fn argmin_flat_basis(op: &OperatorSpec, pot: &PotentialSpec) -> Vec<Vec<f64>> {
    let n = op.dim();
    let kernel = op.kernel_basis();
    if kernel.is_empty() {
        return Vec::new();
    }
    let flat = pot.flat_coordinates(n);
    let k = kernel.len();
    let q = DMatrix::from_fn(n, k, |i, j| kernel[j][i]);
    let constrained: Vec<usize> = (0..n).filter(|&i| !flat[i]).collect();
    if constrained.is_empty() {
        return kernel;
    }
    let m = DMatrix::from_fn(constrained.len(), k, |r, j| q[(constrained[r], j)]);
    let gram = m.transpose() * &m;
    let eig = SymmetricEigen::new(gram);
    let mut out = Vec::new();
    for c in 0..k {
        if eig.eigenvalues[c].abs() <= 1e-12 {
            let v = &q * eig.eigenvectors.column(c);
            let len = v.norm();
            out.push(v.iter().map(|x| x / len).collect());
        }
    }
    out
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// `φ = ½⟨A·,·⟩ + F` with a certified minimizer.
#[derive(Debug, Clone)]
pub struct CompositePotential {
    pub op: OperatorSpec,
    pub pot: PotentialSpec,
    min_phi: f64,
    minimizer: Vec<f64>,
    argmin_basis: Vec<Vec<f64>>,
    crit_tol: f64,
}

impl CompositePotential {
    /// Runs the minimizer oracle and checks the critical-point certificate.
    pub fn certify(op: OperatorSpec, pot: PotentialSpec) -> Result<Self, ModelError> {
        let data = minimize_phi(&op, &pot)?;
        Self::from_minimizer(op, pot, data.minimizer, data.argmin_basis)
    }

    /// Accepts an analytically known minimizer after checking `‖∇φ‖ ≤ ε_crit`.
    pub fn from_minimizer(
        op: OperatorSpec,
        pot: PotentialSpec,
        minimizer: Vec<f64>,
        argmin_basis: Vec<Vec<f64>>,
    ) -> Result<Self, ModelError> {
        if minimizer.len() != op.dim() {
            return Err(ModelError::DimensionMismatch { expected: op.dim(), found: minimizer.len() });
        }
        let crit_tol = critical_tolerance(&op);
        let mut cp = CompositePotential { op, pot, min_phi: 0.0, minimizer, argmin_basis, crit_tol };
        let gnorm = cp.gradient_norm(&cp.minimizer);
        if !(gnorm <= crit_tol) {
            return Err(ModelError::NotCritical { gradient_norm: gnorm, tolerance: crit_tol });
        }
        cp.min_phi = cp.phi(&cp.minimizer);
        Ok(cp)
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn min_phi(&self) -> f64 {
        self.min_phi
    }

    pub fn minimizer(&self) -> &[f64] {
        &self.minimizer
    }

    pub fn argmin_basis(&self) -> &[Vec<f64>] {
        &self.argmin_basis
    }

    pub fn critical_tolerance(&self) -> f64 {
        self.crit_tol
    }

    pub fn phi(&self, u: &[f64]) -> f64 {
        0.5 * self.op.quadratic_form(u) + self.pot.value(u)
    }

    /// `out = Au + f(u)`.
    pub fn gradient(&self, u: &[f64], out: &mut [f64]) {
        let mut fx = vec![0.0; u.len()];
        self.op.apply(u, out);
        self.pot.gradient(u, &mut fx);
        out.iter_mut().zip(&fx).for_each(|(a, b)| *a += b);
    }

    pub fn gradient_norm(&self, u: &[f64]) -> f64 {
        let mut g = vec![0.0; u.len()];
        self.gradient(u, &mut g);
        norm(&g)
    }

    /// Euclidean distance from `u` to the affine set `minimizer + span(argmin_basis)`.
    pub fn dist_to_argmin(&self, u: &[f64]) -> f64 {
        let mut d: Vec<f64> = u.iter().zip(&self.minimizer).map(|(a, b)| a - b).collect();
        for b in &self.argmin_basis {
            let c = dot(&d, b);
            d.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        norm(&d)
    }

    /// Upper bound on the gradient-Lipschitz constant of `f` along any
    /// trajectory with initial energy `energy0` (energy is nonincreasing, so
    /// `F` stays below `energy0 + min φ` relative to its infimum).
    pub fn lipschitz_bound(&self, energy0: f64) -> Option<f64> {
        let inf = self.pot.infimum().unwrap_or(0.0);
        self.pot.lipschitz_on_sublevel(energy0 + self.min_phi - inf)
    }

    /// Explicit-step stability bound `0.5/√(‖A‖ + L_f)`.
    pub fn h_max(&self, lipschitz: f64) -> f64 {
        0.5 / (self.op.norm() + lipschitz).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_without_potential() {
        let op = OperatorSpec::identity(3).unwrap();
        let m = minimize_phi(&op, &PotentialSpec::zero()).unwrap();
        assert_eq!(m.minimizer, vec![0.0; 3]);
        assert_eq!(m.min_phi, 0.0);
        assert!(m.argmin_basis.is_empty());
    }

    #[test]
    fn shifted_quartic_alone() {
        let op = OperatorSpec::new(DMatrix::zeros(1, 1), 1.0).unwrap();
        let pot = PotentialSpec::quartic(vec![2.0], vec![1.0]).unwrap();
        let m = minimize_phi(&op, &pot).unwrap();
        assert!((m.minimizer[0] - 2.0).abs() < 1e-12);
        assert_eq!(m.min_phi, 0.0);
    }

    #[test]
    fn degenerate_diagonal_has_flat_second_axis() {
        let op = OperatorSpec::diagonal(&[1.0, 0.0], 1.0).unwrap();
        let pot = PotentialSpec::quartic(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        let cp = CompositePotential::certify(op, pot).unwrap();
        assert_eq!(cp.argmin_basis().len(), 1);
        let b = &cp.argmin_basis()[0];
        assert!(b[0].abs() < 1e-14 && (b[1].abs() - 1.0).abs() < 1e-14);
        // Gradient vanishes along the flat line.
        for s in [-3.0, 0.5, 10.0] {
            let p: Vec<f64> = cp.minimizer().iter().zip(b).map(|(m, e)| m + s * e).collect();
            assert!(cp.gradient_norm(&p) < 1e-12);
            assert!(cp.dist_to_argmin(&p) < 1e-12);
        }
    }

    #[test]
    fn quartic_on_kernel_leaves_no_flat_direction() {
        let op = OperatorSpec::diagonal(&[1.0, 0.0], 1.0).unwrap();
        let pot = PotentialSpec::quartic(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
        assert!(argmin_flat_basis(&op, &pot).is_empty());
    }

    #[test]
    fn coupled_problem_reaches_tolerance_and_is_global() {
        let n = 6;
        let h: f64 = 1.0 / (n as f64 + 1.0);
        let m = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 2.0 / (h * h),
            1 => -1.0 / (h * h),
            _ => 0.0,
        });
        let op = OperatorSpec::new(m, 0.0).unwrap();
        let pot = PotentialSpec::quartic_uniform(vec![1.0; n], h).unwrap();
        let cp = CompositePotential::certify(op, pot).unwrap();
        assert!(cp.gradient_norm(cp.minimizer()) <= cp.critical_tolerance());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            assert!(cp.phi(&x) >= cp.min_phi() - cp.critical_tolerance());
        }
    }

    #[test]
    fn wrong_minimizer_is_rejected() {
        let op = OperatorSpec::identity(2).unwrap();
        let err = CompositePotential::from_minimizer(op, PotentialSpec::zero(), vec![1.0, 0.0], vec![]).unwrap_err();
        assert!(matches!(err, ModelError::NotCritical { .. }));
    }

    #[test]
    fn phi_is_convex_along_segments() {
        let op = OperatorSpec::diagonal(&[2.0, 0.5, 0.0], 1.0).unwrap();
        let pot = PotentialSpec::log_cosh(vec![0.1, -0.2, 0.3], vec![1.0, 2.0, 0.5]).unwrap();
        let cp = CompositePotential::certify(op, pot).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-4.0..4.0)).collect();
            let y: Vec<f64> = (0..3).map(|_| rng.random_range(-4.0..4.0)).collect();
            let th: f64 = rng.random();
            let z: Vec<f64> = x.iter().zip(&y).map(|(a, b)| th * a + (1.0 - th) * b).collect();
            let rhs = th * cp.phi(&x) + (1.0 - th) * cp.phi(&y);
            assert!(cp.phi(&z) <= rhs + 1e-12 * (1.0 + rhs.abs()));
        }
    }
}

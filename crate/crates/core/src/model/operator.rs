use nalgebra::{DMatrix, SymmetricEigen};

use super::ModelError;

/// Largest admissible dimension for the dense representation.
pub const MAX_DIM: usize = 512;

/// Outcome of the spectral semi-coercivity check `a(v,v) + λ|v|² ≥ μ|v|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoercivityCertificate {
    pub lambda: f64,
    /// Largest μ for the stored λ, i.e. the smallest eigenvalue of `A + λI`.
    pub mu: f64,
    pub smallest_eig_shifted: f64,
}

#[derive(Debug, Clone)]
enum Apply {
    Dense,
    Tridiagonal { diag: Vec<f64>, off: Vec<f64> },
}

/// Symmetric positive semidefinite linear operator on ℝⁿ together with its
/// semi-coercivity data.
///
/// Tridiagonal matrices are detected at construction and applied through a
/// banded fast path.
#[derive(Debug, Clone)]
pub struct OperatorSpec {
    matrix: DMatrix<f64>,
    lambda_shift: f64,
    mu: f64,
    smallest_eig: f64,
    largest_eig: f64,
    apply: Apply,
}

impl OperatorSpec {
    /// Validated operator with the largest μ compatible with `lambda`.
    pub fn new(matrix: DMatrix<f64>, lambda: f64) -> Result<Self, ModelError> {
        let mut op = Self::unchecked(matrix, lambda)?;
        let cert = validate_semi_coercivity(&op)?;
        op.mu = cert.mu;
        Ok(op)
    }

    /// Validated operator with a declared `(λ, μ)` pair; fails if the spectrum
    /// does not support the declared μ.
    pub fn with_certificate(matrix: DMatrix<f64>, lambda: f64, mu: f64) -> Result<Self, ModelError> {
        let mut op = Self::unchecked(matrix, lambda)?;
        op.mu = mu;
        validate_semi_coercivity(&op)?;
        Ok(op)
    }

    /// Builds the operator without any symmetry or spectral validation.
    ///
    /// Used when loading matrices from files so that the validation error can
    /// be reported by [`validate_semi_coercivity`] rather than at parse time.
    pub fn unchecked(matrix: DMatrix<f64>, lambda: f64) -> Result<Self, ModelError> {
        let n = matrix.nrows();
        if n == 0 || n != matrix.ncols() || n > MAX_DIM {
            return Err(ModelError::BadDimension { rows: n, cols: matrix.ncols() });
        }
        if matrix.iter().any(|v| !v.is_finite()) || !lambda.is_finite() || lambda < 0.0 {
            return Err(ModelError::NonFinite("operator entries or shift"));
        }
        let (smallest_eig, largest_eig) = extreme_eigenvalues(&symmetrize(&matrix));
        let apply = detect_tridiagonal(&matrix);
        Ok(OperatorSpec {
            matrix,
            lambda_shift: lambda,
            mu: 0.0,
            smallest_eig,
            largest_eig,
            apply,
        })
    }

    pub fn identity(n: usize) -> Result<Self, ModelError> {
        Self::new(DMatrix::identity(n, n), 0.0)
    }

    pub fn diagonal(entries: &[f64], lambda: f64) -> Result<Self, ModelError> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(entries)), lambda)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn lambda_shift(&self) -> f64 {
        self.lambda_shift
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn smallest_eig(&self) -> f64 {
        self.smallest_eig
    }

    /// Spectral norm ‖A‖ (largest eigenvalue magnitude).
    pub fn norm(&self) -> f64 {
        self.largest_eig.abs().max(self.smallest_eig.abs())
    }

    /// Numerical slack εₛ = 1e−10·‖A‖ used by the PSD and kernel tests.
    pub fn spectral_slack(&self) -> f64 {
        1e-10 * self.norm()
    }

    pub fn is_tridiagonal(&self) -> bool {
        matches!(self.apply, Apply::Tridiagonal { .. })
    }

    /// `out = A x`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        debug_assert!(x.len() == n && out.len() == n);
        match &self.apply {
            Apply::Tridiagonal { diag, off } => {
                if n == 1 {
                    out[0] = diag[0] * x[0];
                    return;
                }
                out[0] = diag[0] * x[0] + off[0] * x[1];
                for i in 1..n - 1 {
                    out[i] = off[i - 1] * x[i - 1] + diag[i] * x[i] + off[i] * x[i + 1];
                }
                out[n - 1] = off[n - 2] * x[n - 2] + diag[n - 1] * x[n - 1];
            }
            Apply::Dense => {
                for (i, o) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (j, xj) in x.iter().enumerate() {
                        acc += self.matrix[(i, j)] * xj;
                    }
                    *o = acc;
                }
            }
        }
    }

    /// Quadratic form a(x, x) = ⟨Ax, x⟩.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut ax = vec![0.0; self.dim()];
        self.apply(x, &mut ax);
        dot(&ax, x)
    }

    /// Orthonormal basis of ker A (eigenvectors with |eigenvalue| ≤ εₛ).
    pub fn kernel_basis(&self) -> Vec<Vec<f64>> {
        let eig = SymmetricEigen::new(symmetrize(&self.matrix));
        let slack = self.spectral_slack().max(1e-300);
        (0..self.dim())
            .filter(|&k| eig.eigenvalues[k].abs() <= slack)
            .map(|k| eig.eigenvectors.column(k).iter().copied().collect())
            .collect()
    }
}

/// Finite-dimensional semi-coercivity check: smallest eigenvalue of `A + λI`
/// must be positive and at least the operator's declared μ.
pub fn validate_semi_coercivity(op: &OperatorSpec) -> Result<CoercivityCertificate, ModelError> {
    let m = &op.matrix;
    let n = m.nrows();
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asym != 0.0 {
        return Err(ModelError::NotSymmetric { max_asymmetry: asym });
    }
    let (lo, hi) = extreme_eigenvalues(m);
    let norm = lo.abs().max(hi.abs());
    if lo < -1e-10 * norm {
        return Err(ModelError::NotPositiveSemidefinite { smallest_eig: lo });
    }
    let shifted = lo + op.lambda_shift;
    if shifted <= 0.0 {
        return Err(ModelError::NotSemiCoercive { lambda: op.lambda_shift, smallest_eig_shifted: shifted });
    }
    // Declared μ may not exceed what the spectrum supports (tiny relative slack
    // absorbs the eigen-solver's rounding).
    if op.mu > shifted * (1.0 + 1e-12) + 1e-14 {
        return Err(ModelError::DeclaredMuTooLarge { declared: op.mu, supported: shifted });
    }
    Ok(CoercivityCertificate { lambda: op.lambda_shift, mu: shifted, smallest_eig_shifted: shifted })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn extreme_eigenvalues(m: &DMatrix<f64>) -> (f64, f64) {
    let eig = SymmetricEigen::new(symmetrize(m));
    let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

fn detect_tridiagonal(m: &DMatrix<f64>) -> Apply {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            if i.abs_diff(j) > 1 && m[(i, j)] != 0.0 {
                return Apply::Dense;
            }
        }
    }
    // The banded path assumes symmetry; asymmetric input stays dense so the
    // validator sees exactly what was supplied.
    for i in 1..n {
        if m[(i, i - 1)] != m[(i - 1, i)] {
            return Apply::Dense;
        }
    }
    let diag = (0..n).map(|i| m[(i, i)]).collect();
    let off = (1..n).map(|i| m[(i, i - 1)]).collect();
    Apply::Tridiagonal { diag, off }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dirichlet(n: usize, h: f64) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 2.0 / (h * h),
            1 => -1.0 / (h * h),
            _ => 0.0,
        })
    }

    #[test]
    fn identity_has_unit_mu() {
        let op = OperatorSpec::identity(3).unwrap();
        let cert = validate_semi_coercivity(&op).unwrap();
        assert_eq!(cert.lambda, 0.0);
        assert!((cert.mu - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_matrix_with_shift() {
        let op = OperatorSpec::new(DMatrix::zeros(2, 2), 1.0).unwrap();
        assert!((op.mu() - 1.0).abs() < 1e-15);
        assert_eq!(op.kernel_basis().len(), 2);
    }

    #[test]
    fn zero_matrix_without_shift_is_rejected() {
        let err = OperatorSpec::new(DMatrix::zeros(2, 2), 0.0).unwrap_err();
        assert!(matches!(err, ModelError::NotSemiCoercive { .. }));
    }

    #[test]
    fn dirichlet_laplacian_mu_matches_closed_form() {
        let h = 1.0 / 21.0;
        let op = OperatorSpec::new(dirichlet(20, h), 0.0).unwrap();
        let closed = 2.0 / (h * h) * (1.0 - (std::f64::consts::PI / 21.0).cos());
        assert!((op.mu() - closed).abs() < 1e-9 * closed, "{} vs {}", op.mu(), closed);
        assert!(op.is_tridiagonal());
    }

    #[test]
    fn asymmetric_matrix_is_reported() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        let op = OperatorSpec::unchecked(m, 0.0).unwrap();
        assert!(matches!(validate_semi_coercivity(&op), Err(ModelError::NotSymmetric { .. })));
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            OperatorSpec::new(m, 5.0),
            Err(ModelError::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn declared_mu_must_be_supported() {
        assert!(OperatorSpec::with_certificate(DMatrix::identity(2, 2), 0.0, 1.0).is_ok());
        assert!(matches!(
            OperatorSpec::with_certificate(DMatrix::identity(2, 2), 0.0, 1.5),
            Err(ModelError::DeclaredMuTooLarge { .. })
        ));
    }

    #[test]
    fn banded_and_dense_apply_agree() {
        let m = dirichlet(7, 0.3);
        let banded = OperatorSpec::new(m.clone(), 0.0).unwrap();
        // Force the dense path with an explicit zero-preserving perturbation far off the band.
        let mut dense_m = m.clone();
        dense_m[(0, 6)] = 1e-300;
        dense_m[(6, 0)] = 1e-300;
        let dense = OperatorSpec::unchecked(dense_m, 0.0).unwrap();
        assert!(!dense.is_tridiagonal());
        let x: Vec<f64> = (0..7).map(|i| (i as f64 * 0.7).sin()).collect();
        let (mut a, mut b) = (vec![0.0; 7], vec![0.0; 7]);
        banded.apply(&x, &mut a);
        dense.apply(&x, &mut b);
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn psd_with_shift_always_succeeds() {
        // λ = |eig_min| + μ for a singular PSD matrix.
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(OperatorSpec::new(m.clone(), 0.0).is_err());
        let op = OperatorSpec::new(m, 0.25).unwrap();
        assert!((op.mu() - 0.25).abs() < 1e-12);
    }
}

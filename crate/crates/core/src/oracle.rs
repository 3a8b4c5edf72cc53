//! Eigenbasis ground truth.
//!
//! Everything here diagonalizes `A` once and evaluates closed forms per
//! eigencomponent. Tests, benchmarks and `dsm verify` compare the matrix-free
//! solvers against these values; the solvers themselves never call in here.

use num_complex::Complex64;

use crate::linops::{norm2, sym_eigen, EigenDecomposition, SymmetricOperator, DEFAULT_NULL_TOL};
use crate::{ComplexState, Error, Result};

/// Relative tolerance on the null-space component of `f` before it is
/// reported as outside the range of `A`.
pub const RANGE_TOL: f64 = 1e-8;

/// Minimal-norm solution of `A y = f` over the numerical range of `A`.
#[derive(Clone, Debug)]
pub struct MinimalNormSolution {
    pub y: Vec<f64>,
    /// Norm of the component of `f` in the null eigenspace.
    pub range_residual: f64,
    /// Number of eigenvalues above the null tolerance.
    pub rank: usize,
    f_norm: f64,
}

impl MinimalNormSolution {
    pub fn range_tolerance(&self) -> f64 {
        RANGE_TOL * self.f_norm.max(1.0)
    }

    pub fn in_range(&self) -> bool {
        self.range_residual <= self.range_tolerance()
    }

    /// Fails with [`Error::RangeViolation`] when `f` has a significant
    /// null-space component.
    pub fn ensure_in_range(self) -> Result<Self> {
        if self.in_range() {
            Ok(self)
        } else {
            Err(Error::RangeViolation {
                range_residual: self.range_residual,
            })
        }
    }
}

/// A diagonalized operator with the closed forms evaluated on it.
#[derive(Clone, Debug)]
pub struct SpectralOracle {
    eig: EigenDecomposition,
    null_tol: f64,
}

impl SpectralOracle {
    pub fn new(a: &SymmetricOperator) -> Result<Self> {
        Self::with_null_tol(a, DEFAULT_NULL_TOL)
    }

    pub fn with_null_tol(a: &SymmetricOperator, null_tol: f64) -> Result<Self> {
        if !(null_tol >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "null_tol must be >= 0, got {null_tol}"
            )));
        }
        Ok(Self {
            eig: sym_eigen(a)?,
            null_tol,
        })
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn n(&self) -> usize {
        self.eig.n()
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: len,
            });
        }
        Ok(())
    }

    fn check_shift(a: f64) -> Result<()> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "shift a must be positive, got {a}"
            )));
        }
        Ok(())
    }

    pub fn is_null(&self, j: usize) -> bool {
        self.eig.is_null(j, self.null_tol)
    }

    pub fn minimal_norm_solution(&self, f: &[f64]) -> Result<MinimalNormSolution> {
        self.check(f.len())?;
        let coeffs = self.eig.coefficients(f);
        let mut y_coeffs = vec![0.0; self.n()];
        let mut null_sq = 0.0;
        let mut rank = 0;
        for (j, &c) in coeffs.iter().enumerate() {
            if self.is_null(j) {
                null_sq += c * c;
            } else {
                y_coeffs[j] = c / self.eig.eigenvalues[j];
                rank += 1;
            }
        }
        Ok(MinimalNormSolution {
            y: self.eig.synthesize(&y_coeffs),
            range_residual: null_sq.sqrt(),
            rank,
            f_norm: norm2(f),
        })
    }

    /// The exact trajectory `u_a(t) = [-i(A+ia)]⁻¹ (I - e^{i(A+ia)t}) f`.
    pub fn closed_form_state(&self, f: &[f64], a: f64, t: f64) -> Result<ComplexState> {
        self.check(f.len())?;
        Self::check_shift(a)?;
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time must be >= 0, got {t}"
            )));
        }
        let i = Complex64::i();
        let coeffs: Vec<Complex64> = self
            .eig
            .coefficients(f)
            .iter()
            .zip(&self.eig.eigenvalues)
            .map(|(&fj, &lambda)| {
                let mu = Complex64::new(-a, lambda);
                let decay = Complex64::new(1.0, 0.0) - (mu * t).exp();
                i / Complex64::new(lambda, a) * decay * fj
            })
            .collect();
        Ok(self.eig.synthesize_complex(&coeffs))
    }

    /// The `t → ∞` limit `i (A + ia)⁻¹ f`.
    pub fn stationary_state(&self, f: &[f64], a: f64) -> Result<ComplexState> {
        self.check(f.len())?;
        Self::check_shift(a)?;
        let i = Complex64::i();
        let coeffs: Vec<Complex64> = self
            .eig
            .coefficients(f)
            .iter()
            .zip(&self.eig.eigenvalues)
            .map(|(&fj, &lambda)| i / Complex64::new(lambda, a) * fj)
            .collect();
        Ok(self.eig.synthesize_complex(&coeffs))
    }

    /// Bias `‖(A + ia)⁻¹ A y - y‖ = sqrt(Σ_j a²/(a² + λ_j²) ⟨v_j, y⟩²)`.
    pub fn spectral_error(&self, y: &[f64], a: f64) -> Result<f64> {
        self.check(y.len())?;
        Self::check_shift(a)?;
        let a2 = a * a;
        Ok(self
            .eig
            .coefficients(y)
            .iter()
            .zip(&self.eig.eigenvalues)
            .map(|(&c, &lambda)| a2 / (a2 + lambda * lambda) * c * c)
            .sum::<f64>()
            .sqrt())
    }

    /// `‖(A + ia)⁻¹ f‖`, the amplitude the transient `e^{-at}` multiplies.
    pub fn resolvent_norm(&self, f: &[f64], a: f64) -> Result<f64> {
        self.check(f.len())?;
        Self::check_shift(a)?;
        Ok(self
            .eig
            .coefficients(f)
            .iter()
            .zip(&self.eig.eigenvalues)
            .map(|(&c, &lambda)| c * c / (lambda * lambda + a * a))
            .sum::<f64>()
            .sqrt())
    }

    /// `e^{-at} ‖(A + ia)⁻¹ f‖`: how far `-i u_a(t)` can still be from its limit.
    pub fn transient_bound(&self, f: &[f64], a: f64, t: f64) -> Result<f64> {
        Ok((-a * t).exp() * self.resolvent_norm(f, a)?)
    }

    /// Bias of the Tikhonov solution, `‖(A² + aI)⁻¹ A² y - y‖`.
    pub fn tikhonov_bias(&self, y: &[f64], a: f64) -> Result<f64> {
        self.check(y.len())?;
        Self::check_shift(a)?;
        Ok(self
            .eig
            .coefficients(y)
            .iter()
            .zip(&self.eig.eigenvalues)
            .map(|(&c, &lambda)| (a / (lambda * lambda + a) * c).powi(2))
            .sum::<f64>()
            .sqrt())
    }

    /// Smallest eigenvalue modulus outside the null space.
    pub fn smallest_nonzero_eigenvalue(&self) -> Option<f64> {
        (0..self.n())
            .filter(|&j| !self.is_null(j))
            .map(|j| self.eig.eigenvalues[j].abs())
            .reduce(f64::min)
    }

    /// Splits `x` into (null-space component, range component).
    pub fn split_null_range(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check(x.len())?;
        let coeffs = self.eig.coefficients(x);
        let (mut null, mut range) = (vec![0.0; self.n()], vec![0.0; self.n()]);
        for (j, &c) in coeffs.iter().enumerate() {
            if self.is_null(j) {
                null[j] = c;
            } else {
                range[j] = c;
            }
        }
        Ok((self.eig.synthesize(&null), self.eig.synthesize(&range)))
    }
}

pub fn minimal_norm_solution(
    a: &SymmetricOperator,
    f: &[f64],
    null_tol: f64,
) -> Result<MinimalNormSolution> {
    SpectralOracle::with_null_tol(a, null_tol)?.minimal_norm_solution(f)
}

pub fn closed_form_state(
    a_op: &SymmetricOperator,
    f: &[f64],
    a: f64,
    t: f64,
) -> Result<ComplexState> {
    SpectralOracle::new(a_op)?.closed_form_state(f, a, t)
}

pub fn spectral_error(a_op: &SymmetricOperator, y: &[f64], a: f64) -> Result<f64> {
    SpectralOracle::new(a_op)?.spectral_error(y, a)
}

//! Dense real symmetric operators, complex state vectors, the cyclic Jacobi
//! eigensolver and condition numbers.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::{Error, Result};

/// Relative asymmetry accepted (and averaged away) by [`SymmetricOperator::from_row_major`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Default relative threshold below which an eigenvalue counts as zero.
pub const DEFAULT_NULL_TOL: f64 = 1e-12;

/// Sweep cap for [`sym_eigen`].
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Off-diagonal Frobenius norm, relative to `‖A‖_F`, at which Jacobi stops.
pub const JACOBI_OFF_TOL: f64 = 1e-14;

/// A dense, exactly symmetric `n × n` real matrix stored row-major.
///
/// Immutable after construction. The only thing the solvers ever ask of it is a
/// matrix-vector product.
#[derive(Clone, PartialEq)]
pub struct SymmetricOperator {
    n: usize,
    entries: Vec<f64>,
}

impl fmt::Debug for SymmetricOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for row in self.entries.chunks(self.n) {
            list.entry(&row);
        }
        list.finish()
    }
}

impl SymmetricOperator {
    /// Builds an operator from `n * n` row-major values.
    ///
    /// Input whose largest asymmetry `|m_ij - m_ji|` is at most
    /// [`SYMMETRY_TOL`] times the largest entry is replaced by `(M + Mᵀ)/2`;
    /// anything more asymmetric is rejected.
    pub fn from_row_major(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "operator dimension must be at least 1".into(),
            ));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        if let Some(bad) = entries.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite matrix entry {bad}"
            )));
        }
        let max_abs = entries.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let mut asymmetry = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                asymmetry = asymmetry.max((entries[i * n + j] - entries[j * n + i]).abs());
            }
        }
        let tolerance = SYMMETRY_TOL * max_abs;
        if asymmetry > tolerance {
            return Err(Error::NotSymmetric {
                asymmetry,
                tolerance,
            });
        }
        let mut entries = entries;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (entries[i * n + j] + entries[j * n + i]);
                entries[i * n + j] = avg;
                entries[j * n + i] = avg;
            }
        }
        Ok(Self { n, entries })
    }

    /// Builds an operator from the lower triangle of `f(i, j)`, `j <= i`.
    pub fn from_lower_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "operator dimension must be at least 1".into(),
            ));
        }
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        Self::from_row_major(n, entries)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_lower_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_lower_fn(n, |_, _| 0.0)
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_lower_fn(diag.len(), |i, j| if i == j { diag[i] } else { 0.0 })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Row-major view of the entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Returns `c A`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|x| c * x).collect(),
        }
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got,
            });
        }
        Ok(())
    }

    /// `out = A x` for real vectors.
    pub fn apply_real_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_dim(x.len())?;
        self.check_dim(out.len())?;
        for (row, o) in self.entries.chunks_exact(self.n).zip(out.iter_mut()) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        Ok(())
    }

    pub fn apply_real(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n];
        self.apply_real_into(x, &mut out)?;
        Ok(out)
    }

    /// `out = A x` for complex vectors, acting on real and imaginary parts
    /// independently. Lengths are the caller's responsibility.
    #[inline]
    pub(crate) fn apply_complex_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        for (row, o) in self.entries.chunks_exact(self.n).zip(out.iter_mut()) {
            let mut re = 0.0;
            let mut im = 0.0;
            for (a, z) in row.iter().zip(x) {
                re += a * z.re;
                im += a * z.im;
            }
            *o = Complex64::new(re, im);
        }
    }
}

/// Complex `n`-vector: the state `u(t)` of the dynamical system.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexState(Vec<Complex64>);

impl ComplexState {
    pub fn zeros(n: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn from_real(x: &[f64]) -> Self {
        Self(x.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch {
                expected: re.len(),
                got: im.len(),
            });
        }
        Ok(Self(
            re.iter()
                .zip(im)
                .map(|(&r, &i)| Complex64::new(r, i))
                .collect(),
        ))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn re(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.im).collect()
    }

    /// Multiplies every component by `c`.
    pub fn scale(&self, c: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * c).collect())
    }

    /// `‖self - other‖`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl From<Vec<Complex64>> for ComplexState {
    fn from(v: Vec<Complex64>) -> Self {
        Self(v)
    }
}

impl Index<usize> for ComplexState {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for ComplexState {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

/// `A x`, applied to real and imaginary parts independently.
pub fn matvec(a: &SymmetricOperator, x: &ComplexState) -> Result<ComplexState> {
    a.check_dim(x.len())?;
    let mut out = ComplexState::zeros(a.n());
    a.apply_complex_into(x.as_slice(), out.as_mut_slice());
    Ok(out)
}

/// Full eigendecomposition `A = V diag(λ) Vᵀ`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[j]` pairs with `eigenvalues[j]`; orthonormal.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `max_j ‖A v_j - λ_j v_j‖`.
    pub residual_norm: f64,
    pub sweeps: usize,
}

impl EigenDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()))
    }

    /// Whether eigenvalue `j` lies in the numerical null space.
    pub fn is_null(&self, j: usize, null_tol: f64) -> bool {
        self.eigenvalues[j].abs() <= null_tol * self.max_abs_eigenvalue()
    }

    /// Coefficients `⟨v_j, x⟩`.
    pub fn coefficients(&self, x: &[f64]) -> Vec<f64> {
        self.eigenvectors.iter().map(|v| dot(v, x)).collect()
    }

    /// `Σ_j c_j v_j`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        for (v, &c) in self.eigenvectors.iter().zip(coeffs) {
            for (o, vi) in out.iter_mut().zip(v) {
                *o += c * vi;
            }
        }
        out
    }

    pub fn synthesize_complex(&self, coeffs: &[Complex64]) -> ComplexState {
        let mut out = ComplexState::zeros(self.n());
        for (v, &c) in self.eigenvectors.iter().zip(coeffs) {
            for (o, &vi) in out.as_mut_slice().iter_mut().zip(v) {
                *o += c * vi;
            }
        }
        out
    }

    /// `max |VᵀV - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, vi) in self.eigenvectors.iter().enumerate() {
            for (j, vj) in self.eigenvectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(vi, vj) - target).abs());
            }
        }
        worst
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigendecomposition by cyclic Jacobi rotations.
///
/// Each sweep visits every off-diagonal pair once in row order; iteration stops
/// when the off-diagonal Frobenius norm drops to [`JACOBI_OFF_TOL`] `· ‖A‖_F`.
pub fn sym_eigen(a: &SymmetricOperator) -> Result<EigenDecomposition> {
    let n = a.n();
    let mut m = a.as_slice().to_vec();
    // v is stored row-major; column j is the j-th eigenvector.
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let threshold = JACOBI_OFF_TOL * a.frobenius_norm();

    let off_norm = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j] * m[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&m);
        if off <= threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&j| m[j * n + j]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| (0..n).map(|k| v[k * n + j]).collect())
        .collect();

    let mut residual_norm = 0.0_f64;
    let mut av = vec![0.0; n];
    for (lambda, vec) in eigenvalues.iter().zip(&eigenvectors) {
        a.apply_real_into(vec, &mut av)?;
        let r = av
            .iter()
            .zip(vec)
            .map(|(x, y)| (x - lambda * y).powi(2))
            .sum::<f64>()
            .sqrt();
        residual_norm = residual_norm.max(r);
    }

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
        residual_norm,
        sweeps,
    })
}

/// Condition number `k(A)`, infinite when `A` has a nontrivial null space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Condition {
    Finite(f64),
    /// Some eigenvalue is below the null tolerance.
    Singular,
    /// Every eigenvalue is below the null tolerance.
    ZeroOperator,
}

impl Condition {
    /// The numeric value, `f64::INFINITY` for the singular cases.
    pub fn value(&self) -> f64 {
        match *self {
            Condition::Finite(k) => k,
            Condition::Singular | Condition::ZeroOperator => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Condition::Finite(_))
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Finite(k) => write!(f, "{k:e}"),
            Condition::Singular => f.write_str("inf"),
            Condition::ZeroOperator => f.write_str("inf (zero operator)"),
        }
    }
}

pub fn condition_number(a: &SymmetricOperator, null_tol: f64) -> Result<Condition> {
    if !(null_tol >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "null_tol must be >= 0, got {null_tol}"
        )));
    }
    Ok(condition_from_eigen(&sym_eigen(a)?, null_tol))
}

pub fn condition_from_eigen(eig: &EigenDecomposition, null_tol: f64) -> Condition {
    let max = eig.max_abs_eigenvalue();
    let cutoff = null_tol * max;
    if max == 0.0 {
        return Condition::ZeroOperator;
    }
    let min = eig
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |m, l| m.min(l.abs()));
    if min <= cutoff {
        Condition::Singular
    } else {
        Condition::Finite(max / min)
    }
}

/// Safety factor applied to the power-iteration estimate.
pub const RADIUS_SAFETY: f64 = 1.1;

/// Upper estimate of the spectral radius by power iteration.
///
/// The norm ratio `‖A x_k‖ / ‖x_k‖` is nondecreasing for symmetric `A` and
/// approaches `ρ(A)` from below; the result is that value times
/// [`RADIUS_SAFETY`], floored at the largest absolute row sum divided by `n`.
pub fn spectral_radius_estimate(a: &SymmetricOperator, iters: usize) -> f64 {
    let n = a.n();
    let iters = iters.max(1);
    let row_floor = (0..n)
        .map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0_f64, f64::max)
        / n as f64;

    // Deterministic start: golden-ratio jitter keeps it off any coordinate subspace.
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
        .collect();
    let nx = norm2(&x);
    x.iter_mut().for_each(|v| *v /= nx);

    let mut y = vec![0.0; n];
    let mut best = 0.0_f64;
    for _ in 0..iters {
        a.apply_real_into(&x, &mut y).expect("square operator");
        let ny = norm2(&y);
        best = best.max(ny);
        if ny == 0.0 {
            break;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ny;
        }
    }
    (RADIUS_SAFETY * best).max(row_floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hilbert(n: usize) -> SymmetricOperator {
        SymmetricOperator::from_lower_fn(n, |i, j| 1.0 / (i + j + 1) as f64).unwrap()
    }

    #[test]
    fn matvec_identity() {
        let a = SymmetricOperator::identity(2).unwrap();
        let x = ComplexState::from(vec![Complex64::new(1.0, 2.0), Complex64::new(3.0, 0.0)]);
        assert_eq!(matvec(&a, &x).unwrap(), x);
    }

    #[test]
    fn matvec_diagonal() {
        let a = SymmetricOperator::diagonal(&[2.0, 3.0]).unwrap();
        let y = matvec(&a, &ComplexState::from_real(&[1.0, 1.0])).unwrap();
        assert_eq!(y.re(), vec![2.0, 3.0]);
        assert_eq!(y.im(), vec![0.0, 0.0]);
    }

    #[test]
    fn matvec_hilbert_first_column() {
        let y = matvec(&hilbert(2), &ComplexState::from_real(&[1.0, 0.0])).unwrap();
        assert_eq!(y.re(), vec![1.0, 0.5]);
    }

    #[test]
    fn matvec_rejects_wrong_dimension() {
        let a = SymmetricOperator::identity(3).unwrap();
        let err = matvec(&a, &ComplexState::zeros(2)).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 3,
                got: 2
            }
        ));
    }

    #[test]
    fn constructor_symmetrizes_roundoff() {
        let a = SymmetricOperator::from_row_major(2, vec![1.0, 0.5, 0.5 + 1e-14, 2.0]).unwrap();
        assert_eq!(a.get(0, 1), a.get(1, 0));
        assert_relative_eq!(a.get(0, 1), 0.5 + 0.5e-14, epsilon = 1e-18);
    }

    #[test]
    fn constructor_rejects_asymmetry() {
        let err = SymmetricOperator::from_row_major(2, vec![1.0, 0.5, 0.4, 2.0]).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric { .. }));
        assert!(SymmetricOperator::from_row_major(0, vec![]).is_err());
        assert!(SymmetricOperator::from_row_major(2, vec![1.0; 3]).is_err());
        assert!(SymmetricOperator::from_row_major(1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn eigen_identity() {
        let e = sym_eigen(&SymmetricOperator::identity(3).unwrap()).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0, 1.0]);
        assert_eq!(e.sweeps, 0);
    }

    #[test]
    fn eigen_diagonal_sorted_with_basis_vectors() {
        let e = sym_eigen(&SymmetricOperator::diagonal(&[3.0, 1.0]).unwrap()).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 3.0]);
        assert_eq!(e.eigenvectors[0], vec![0.0, 1.0]);
        assert_eq!(e.eigenvectors[1], vec![1.0, 0.0]);
    }

    #[test]
    fn eigen_hilbert3() {
        // Reference values from a 40-digit symmetric eigensolve (mpmath), cross-checked in tests/eigen_oracle.rs.
        let e = sym_eigen(&hilbert(3)).unwrap();
        let expected = [
            0.002_687_340_355_773_529,
            0.122_327_065_853_905_85,
            1.408_318_927_123_654,
        ];
        for (got, want) in e.eigenvalues.iter().zip(expected) {
            assert_relative_eq!(*got, want, max_relative = 1e-12);
        }
        assert!(e.orthonormality_defect() <= 1e-10);
        assert!(e.residual_norm <= 1e-10 * 1.4083);
    }

    #[test]
    fn condition_examples() {
        let i4 = SymmetricOperator::identity(4).unwrap();
        assert_eq!(
            condition_number(&i4, DEFAULT_NULL_TOL).unwrap(),
            Condition::Finite(1.0)
        );

        let d = SymmetricOperator::diagonal(&[10.0, 1e-9]).unwrap();
        let k = condition_number(&d, 0.0).unwrap().value();
        assert_relative_eq!(k, 1e10, max_relative = 1e-15);

        let s = SymmetricOperator::diagonal(&[1.0, 0.0]).unwrap();
        assert_eq!(condition_number(&s, 1e-14).unwrap(), Condition::Singular);
        assert_eq!(condition_number(&s, 0.0).unwrap().value(), f64::INFINITY);

        let z = SymmetricOperator::zeros(3).unwrap();
        assert_eq!(
            condition_number(&z, DEFAULT_NULL_TOL).unwrap(),
            Condition::ZeroOperator
        );

        assert!(condition_number(&i4, -1.0).is_err());
    }

    #[test]
    fn hilbert_conditions() {
        let k3 = condition_number(&hilbert(3), DEFAULT_NULL_TOL)
            .unwrap()
            .value();
        assert_relative_eq!(k3, 524.056_777_586_06, max_relative = 1e-9);
        let k6 = condition_number(&hilbert(6), DEFAULT_NULL_TOL)
            .unwrap()
            .value();
        assert_relative_eq!(k6, 1.495e7, max_relative = 1e-3);
    }

    #[test]
    fn radius_examples() {
        let d = SymmetricOperator::diagonal(&[5.0, 1.0]).unwrap();
        let r = spectral_radius_estimate(&d, 50);
        assert!((5.0..=5.5).contains(&r), "{r}");

        assert_eq!(
            spectral_radius_estimate(&SymmetricOperator::zeros(2).unwrap(), 10),
            0.0
        );

        let r = spectral_radius_estimate(&hilbert(3), 100);
        assert!((1.4083..=1.5492).contains(&r), "{r}");
    }

    #[test]
    fn radius_handles_indefinite_pairs() {
        // ±2 have equal modulus; the norm ratio still converges to 2.
        let a = SymmetricOperator::diagonal(&[2.0, -2.0, 0.5]).unwrap();
        let r = spectral_radius_estimate(&a, 30);
        assert!((2.0 * (1.0 - 1e-3)..=2.2 + 1e-12).contains(&r), "{r}");
    }
}

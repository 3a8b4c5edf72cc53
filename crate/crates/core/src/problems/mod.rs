//! Benchmark problems with known minimal-norm solutions.

mod mtx;
mod rng;

pub use mtx::{read_matrix_market, read_vector, write_matrix_market, write_vector};
pub use rng::SeededRng;

use crate::linops::{
    condition_from_eigen, dot, norm2, sym_eigen, Condition, SymmetricOperator, DEFAULT_NULL_TOL,
};
use crate::{Error, Result};

pub const MAX_HILBERT_N: usize = 512;

/// A consistent system `A y_true = f` with `y_true` orthogonal to the null space.
#[derive(Clone, Debug)]
pub struct Problem {
    pub a: SymmetricOperator,
    pub y_true: Vec<f64>,
    pub f: Vec<f64>,
    pub label: String,
    pub condition: Condition,
}

impl Problem {
    pub fn n(&self) -> usize {
        self.a.n()
    }

    /// Re-derives the constructor postconditions: `f = A y_true` to `1e-12`
    /// relative and `y_true` orthogonal to every null eigenvector to `1e-10`.
    pub fn check_invariants(&self) -> Result<()> {
        let ay = self.a.apply_real(&self.y_true)?;
        let misfit = norm2(
            &ay.iter()
                .zip(&self.f)
                .map(|(x, y)| x - y)
                .collect::<Vec<_>>(),
        );
        if misfit > 1e-12 * norm2(&self.f).max(1.0) {
            return Err(Error::Degenerate(format!(
                "{}: |A y - f| = {misfit:e}",
                self.label
            )));
        }
        let eig = sym_eigen(&self.a)?;
        for (j, v) in eig.eigenvectors.iter().enumerate() {
            if eig.is_null(j, DEFAULT_NULL_TOL) {
                let c = dot(v, &self.y_true).abs();
                if c > 1e-10 {
                    return Err(Error::Degenerate(format!(
                        "{}: y_true has null-space component {c:e}",
                        self.label
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Noisy right-hand side `f_δ = f + e` with `‖e‖ = δ`.
#[derive(Clone, Debug)]
pub struct NoisyRhs {
    pub f_delta: Vec<f64>,
    pub delta: f64,
    pub seed: u64,
}

/// Hilbert matrix `H[i][j] = 1 / (i + j + 1)`.
pub fn gen_hilbert(n: usize) -> Result<SymmetricOperator> {
    if !(1..=MAX_HILBERT_N).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "Hilbert dimension must be in 1..={MAX_HILBERT_N}, got {n}"
        )));
    }
    SymmetricOperator::from_lower_fn(n, |i, j| 1.0 / (i + j + 1) as f64)
}

/// Random orthogonal matrix from modified Gram–Schmidt (two passes) on a
/// Gaussian matrix; columns returned as vectors.
fn random_orthogonal(n: usize, rng: &mut SeededRng) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = (0..n).map(|_| rng.normals(n)).collect();
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let c = dot(&done[k], &rest[0]);
                for (x, q) in rest[0].iter_mut().zip(&done[k]) {
                    *x -= c * q;
                }
            }
        }
        let nrm = norm2(&cols[j]);
        cols[j].iter_mut().for_each(|x| *x /= nrm);
    }
    cols
}

fn unit_vector_off(null_basis: &[&Vec<f64>], n: usize, rng: &mut SeededRng) -> Result<Vec<f64>> {
    let mut y = rng.normals(n);
    let nrm = norm2(&y);
    y.iter_mut().for_each(|x| *x /= nrm);
    for _ in 0..2 {
        for v in null_basis {
            let c = dot(v, &y);
            for (x, vi) in y.iter_mut().zip(v.iter()) {
                *x -= c * vi;
            }
        }
    }
    let nrm = norm2(&y);
    if nrm < 1e-8 {
        return Err(Error::Degenerate(
            "solution vector lies in the null space".into(),
        ));
    }
    y.iter_mut().for_each(|x| *x /= nrm);
    Ok(y)
}

/// `A = Q diag(λ) Qᵀ` with seeded random orthogonal `Q`, a seeded unit
/// `y_true` orthogonal to the zero eigenvalues' eigenvectors, and `f = A y_true`.
pub fn gen_spectrum(eigenvalues: &[f64], seed: u64) -> Result<Problem> {
    let n = eigenvalues.len();
    if n == 0 {
        return Err(Error::InvalidArgument("eigenvalue list is empty".into()));
    }
    if eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidArgument("eigenvalues must be finite".into()));
    }
    let mut rng = SeededRng::new(seed);
    let q = random_orthogonal(n, &mut rng);
    let a = SymmetricOperator::from_lower_fn(n, |i, j| {
        q.iter()
            .zip(eigenvalues)
            .map(|(col, l)| l * col[i] * col[j])
            .sum()
    })?;

    let max = eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    let null_basis: Vec<&Vec<f64>> = q
        .iter()
        .zip(eigenvalues)
        .filter(|(_, l)| l.abs() <= DEFAULT_NULL_TOL * max)
        .map(|(col, _)| col)
        .collect();
    let y_true = unit_vector_off(&null_basis, n, &mut rng)?;
    let f = a.apply_real(&y_true)?;
    let condition = condition_from_eigen(&sym_eigen(&a)?, DEFAULT_NULL_TOL);
    let label = format!(
        "spectrum({})",
        eigenvalues
            .iter()
            .map(|l| format!("{l:e}"))
            .collect::<Vec<_>>()
            .join(",")
    );
    Ok(Problem {
        a,
        y_true,
        f,
        label,
        condition,
    })
}

/// Wraps an arbitrary operator with a seeded unit solution orthogonal to its
/// numerical null space and the matching right-hand side.
pub fn problem_from_operator(
    a: SymmetricOperator,
    seed: u64,
    label: impl Into<String>,
) -> Result<Problem> {
    let eig = sym_eigen(&a)?;
    let null_basis: Vec<&Vec<f64>> = eig
        .eigenvectors
        .iter()
        .enumerate()
        .filter(|(j, _)| eig.is_null(*j, DEFAULT_NULL_TOL))
        .map(|(_, v)| v)
        .collect();
    let mut rng = SeededRng::new(seed);
    let y_true = unit_vector_off(&null_basis, a.n(), &mut rng)?;
    let f = a.apply_real(&y_true)?;
    Ok(Problem {
        condition: condition_from_eigen(&eig, DEFAULT_NULL_TOL),
        a,
        y_true,
        f,
        label: label.into(),
    })
}

/// Symmetric matrix with independent `N(0, 1/n)` entries on and below the diagonal.
pub fn gen_random_symmetric(n: usize, seed: u64) -> Result<SymmetricOperator> {
    let mut rng = SeededRng::new(seed);
    let scale = 1.0 / (n as f64).sqrt();
    SymmetricOperator::from_lower_fn(n, |_, _| scale * rng.normal())
}

/// Adds a seeded Gaussian perturbation rescaled to norm exactly `delta`.
pub fn add_noise(f: &[f64], delta: f64, seed: u64) -> Result<NoisyRhs> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "noise level must be >= 0, got {delta}"
        )));
    }
    let e = noise_vector(f.len(), delta, seed);
    Ok(NoisyRhs {
        f_delta: f.iter().zip(&e).map(|(x, y)| x + y).collect(),
        delta,
        seed,
    })
}

/// The perturbation [`add_noise`] adds: seeded direction, norm `delta`.
pub fn noise_vector(n: usize, delta: f64, seed: u64) -> Vec<f64> {
    if delta == 0.0 || n == 0 {
        return vec![0.0; n];
    }
    let mut rng = SeededRng::new(seed);
    let mut e = rng.normals(n);
    let nrm = norm2(&e);
    e.iter_mut().for_each(|x| *x *= delta / nrm);
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::condition_number;
    use approx::assert_relative_eq;

    #[test]
    fn hilbert2() {
        let h = gen_hilbert(2).unwrap();
        assert_eq!(h.as_slice(), &[1.0, 0.5, 0.5, 1.0 / 3.0]);
        assert!(gen_hilbert(0).is_err());
        assert!(gen_hilbert(513).is_err());
    }

    #[test]
    fn hilbert_conditions() {
        let k3 = condition_number(&gen_hilbert(3).unwrap(), DEFAULT_NULL_TOL)
            .unwrap()
            .value();
        assert_relative_eq!(k3, 524.06, max_relative = 1e-5);
        let k6 = condition_number(&gen_hilbert(6).unwrap(), DEFAULT_NULL_TOL)
            .unwrap()
            .value();
        assert_relative_eq!(k6, 1.495e7, max_relative = 1e-3);
    }

    #[test]
    fn spectrum_one_by_one() {
        let p = gen_spectrum(&[1.0], 99).unwrap();
        assert_eq!(p.a.as_slice(), &[1.0]);
        assert_relative_eq!(p.y_true[0].abs(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn spectrum_condition() {
        let p = gen_spectrum(&[1.0, 1e-6], 3).unwrap();
        assert_relative_eq!(p.condition.value(), 1e6, max_relative = 1e-8);
        p.check_invariants().unwrap();
    }

    #[test]
    fn spectrum_singular() {
        let p = gen_spectrum(&[1.0, 1e-3, 0.0], 5).unwrap();
        assert_eq!(p.condition, Condition::Singular);
        p.check_invariants().unwrap();
        let eig = sym_eigen(&p.a).unwrap();
        let rank = (0..3)
            .filter(|&j| !eig.is_null(j, DEFAULT_NULL_TOL))
            .count();
        assert_eq!(rank, 2);
        assert_relative_eq!(norm2(&p.y_true), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn spectrum_rejects_degenerate() {
        assert!(matches!(
            gen_spectrum(&[0.0, 0.0], 1),
            Err(Error::Degenerate(_))
        ));
        assert!(gen_spectrum(&[], 1).is_err());
    }

    #[test]
    fn spectrum_round_trip() {
        let want = [2.0, -1.0, 0.5, 1e-4, 0.0, 3.0];
        let p = gen_spectrum(&want, 11).unwrap();
        let mut sorted = want.to_vec();
        sorted.sort_by(f64::total_cmp);
        let got = sym_eigen(&p.a).unwrap().eigenvalues;
        for (g, w) in got.iter().zip(&sorted) {
            assert!((g - w).abs() <= 1e-9, "{g} vs {w}");
        }
    }

    #[test]
    fn noise_examples() {
        let f = vec![1.0, -2.0, 0.5];
        let n0 = add_noise(&f, 0.0, 1).unwrap();
        assert_eq!(n0.f_delta, f);

        let nz = add_noise(&[0.0; 4], 1e-3, 8).unwrap();
        assert_relative_eq!(norm2(&nz.f_delta), 1e-3, epsilon = 1e-17);

        let n1 = add_noise(&f, 1e-3, 8).unwrap();
        let diff: Vec<f64> = n1.f_delta.iter().zip(&f).map(|(x, y)| x - y).collect();
        // Forming f + e rounds each component to the grid of f.
        assert!((norm2(&diff) - 1e-3).abs() <= 1e-15 * 1e-3 + f64::EPSILON * norm2(&n1.f_delta));

        let n2 = add_noise(&f, 1e-3, 8).unwrap();
        assert_eq!(n1.f_delta, n2.f_delta);
        assert!(add_noise(&f, -1.0, 8).is_err());
    }

    #[test]
    fn noise_vector_norm_is_exact() {
        for seed in 0..20 {
            let e = noise_vector(7, 1e-8, seed);
            assert_relative_eq!(norm2(&e), 1e-8, max_relative = 1e-15);
        }
    }

    #[test]
    fn generators_deterministic() {
        let a = gen_spectrum(&[1.0, 0.1, 0.01], 17).unwrap();
        let b = gen_spectrum(&[1.0, 0.1, 0.01], 17).unwrap();
        assert_eq!(a.a, b.a);
        assert_eq!(a.y_true, b.y_true);
        assert_eq!(a.f, b.f);
        let c = gen_spectrum(&[1.0, 0.1, 0.01], 18).unwrap();
        assert_ne!(a.a, c.a);
    }

    #[test]
    fn operator_problem_invariants() {
        let p = problem_from_operator(gen_hilbert(5).unwrap(), 3, "hilbert(5)").unwrap();
        p.check_invariants().unwrap();
        let s = SymmetricOperator::diagonal(&[1.0, 0.0, 2.0]).unwrap();
        let p = problem_from_operator(s, 3, "diag").unwrap();
        assert_eq!(p.y_true[1], 0.0);
        p.check_invariants().unwrap();
    }
}

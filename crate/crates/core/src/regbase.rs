//! Tikhonov baseline: minimize `‖Au - f_δ‖² + a‖u‖²` by conjugate gradients on
//! `(A² + aI) u = A f_δ`, applying `A` twice per iteration instead of forming `A²`.

use crate::linops::{dot, norm2, SymmetricOperator};
use crate::{Error, Result};

pub const DEFAULT_CG_TOL: f64 = 1e-12;

/// Default iteration cap is this many times the dimension.
pub const DEFAULT_CG_MAX_FACTOR: usize = 10;

#[derive(Clone, Debug)]
pub struct TikhonovReport {
    pub estimate: Vec<f64>,
    pub a_used: f64,
    pub cg_iterations: usize,
    /// True relative residual `‖(A² + aI)u - A f_δ‖ / ‖A f_δ‖`.
    pub cg_residual: f64,
    pub converged: bool,
}

/// `F(u) = ‖Au - f‖² + a‖u‖²`.
pub fn tikhonov_functional(a_op: &SymmetricOperator, f: &[f64], a: f64, u: &[f64]) -> Result<f64> {
    let au = a_op.apply_real(u)?;
    let misfit: f64 = au.iter().zip(f).map(|(x, y)| (x - y).powi(2)).sum();
    Ok(misfit + a * dot(u, u))
}

struct NormalOperator<'a> {
    a_op: &'a SymmetricOperator,
    shift: f64,
    scratch: Vec<f64>,
}

impl NormalOperator<'_> {
    fn apply(&mut self, x: &[f64], out: &mut [f64]) {
        self.a_op
            .apply_real_into(x, &mut self.scratch)
            .expect("dimension checked");
        self.a_op
            .apply_real_into(&self.scratch, out)
            .expect("dimension checked");
        for (o, xi) in out.iter_mut().zip(x) {
            *o += self.shift * xi;
        }
    }
}

/// Solves the Tikhonov normal equations.
///
/// Convergence is judged on the true residual: whenever the recursive residual
/// meets `cg_tol`, the residual is recomputed from scratch and CG restarts from the
/// current iterate if it has drifted above the tolerance. Hitting `cg_max` returns
/// the last iterate with `converged = false`.
pub fn tikhonov_solve(
    a_op: &SymmetricOperator,
    f_delta: &[f64],
    a: f64,
    cg_tol: f64,
    cg_max: usize,
) -> Result<TikhonovReport> {
    let n = a_op.n();
    if f_delta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: f_delta.len(),
        });
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Tikhonov parameter must be positive, got {a}"
        )));
    }
    if !(cg_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cg_tol must be positive, got {cg_tol}"
        )));
    }

    let b = a_op.apply_real(f_delta)?;
    let b_norm = norm2(&b);
    let mut u = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(TikhonovReport {
            estimate: u,
            a_used: a,
            cg_iterations: 0,
            cg_residual: 0.0,
            converged: true,
        });
    }

    let mut op = NormalOperator {
        a_op,
        shift: a,
        scratch: vec![0.0; n],
    };
    let target = cg_tol * b_norm;
    let mut q = vec![0.0; n];
    let true_residual = |op: &mut NormalOperator, u: &[f64], q: &mut [f64]| -> Vec<f64> {
        op.apply(u, q);
        b.iter().zip(q.iter()).map(|(bi, qi)| bi - qi).collect()
    };

    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cg_max {
        op.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if pq <= 0.0 {
            break;
        }
        let alpha = rr / pq;
        for ((ui, ri), (pi, qi)) in u.iter_mut().zip(r.iter_mut()).zip(p.iter().zip(&q)) {
            *ui += alpha * pi;
            *ri -= alpha * qi;
        }
        iterations += 1;
        let rr_new = dot(&r, &r);
        if rr_new.sqrt() <= target {
            r = true_residual(&mut op, &u, &mut q);
            rr = dot(&r, &r);
            if rr.sqrt() <= target {
                converged = true;
                break;
            }
            p.clone_from(&r);
            continue;
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
    }

    let r = true_residual(&mut op, &u, &mut q);
    let cg_residual = norm2(&r) / b_norm;
    Ok(TikhonovReport {
        estimate: u,
        a_used: a,
        cg_iterations: iterations,
        cg_residual,
        converged: converged && cg_residual <= cg_tol,
    })
}

/// [`tikhonov_solve`] with the default tolerance and a cap of `10 n` iterations.
pub fn tikhonov_solve_default(
    a_op: &SymmetricOperator,
    f_delta: &[f64],
    a: f64,
) -> Result<TikhonovReport> {
    tikhonov_solve(
        a_op,
        f_delta,
        a,
        DEFAULT_CG_TOL,
        DEFAULT_CG_MAX_FACTOR * a_op.n(),
    )
}

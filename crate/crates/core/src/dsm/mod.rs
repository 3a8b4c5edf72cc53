//! The dynamical-systems solver.
//!
//! For noisy data `f_δ` the state of `u' = i(A + ia) u + f_δ`, `u(0) = 0`, is
//! integrated to a horizon `T`; the estimate of the minimal-norm solution is
//! `-i u(T)`. The distance to the true solution `y` splits into a bias
//! (`‖(A+ia)⁻¹Ay - y‖`), a transient (`e^{-aT} ‖(A+ia)⁻¹f‖`) and a noise term
//! bounded by `δ/a`.

mod integrator;
mod schedule;

pub(crate) use integrator::{evolve_with, Tableau};
pub use integrator::{
    rk4_evolve, rk4_propagate, IntegratorConfig, Sample, StepRule, Trajectory, AUTO_STEP_PRODUCT,
    DEFAULT_H_MAX, DEFAULT_MAX_STEPS, RADIUS_ITERS, STABILITY_LIMIT,
};
pub use schedule::{HorizonRule, Schedule, ShiftRule, A_FLOOR, DELTA_FLOOR};

use num_complex::Complex64;

use crate::linops::{norm2, SymmetricOperator};
use crate::{ComplexState, Error, Result};

/// Which form of the Cauchy problem produced a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Formulation {
    /// `u' = i(A+ia)u + f`, estimate `Re(-i u)`.
    Standard,
    /// `v' = i(A+ia)v - i f`, estimate `Re(v)`.
    Rotated,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub estimate: Vec<f64>,
    /// Norm of the imaginary part discarded by the extraction.
    pub imag_residue: f64,
    pub a_used: f64,
    pub t_used: f64,
    pub delta_declared: f64,
    /// `delta_declared / a_used`.
    pub noise_bound: f64,
    pub steps_taken: u64,
    pub h_used: f64,
    pub formulation: Formulation,
    /// `(t, ‖u(t)‖)` every `sample_stride` steps.
    pub samples: Vec<(f64, f64)>,
}

/// `δ / a`, the bound on how far noise of size `δ` can move the state.
pub fn noise_propagation_bound(delta: f64, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "shift a must be positive, got {a}"
        )));
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise level must be >= 0, got {delta}"
        )));
    }
    Ok(delta / a)
}

fn report(tr: Trajectory, formulation: Formulation, a: f64, horizon: f64) -> SolveReport {
    // Standard: -i(x + iy) = y - ix.  Rotated: the state already is the estimate.
    let (estimate, residue): (Vec<f64>, Vec<f64>) = match formulation {
        Formulation::Standard => (tr.state.im(), tr.state.re()),
        Formulation::Rotated => (tr.state.re(), tr.state.im()),
    };
    SolveReport {
        estimate,
        imag_residue: norm2(&residue),
        a_used: a,
        t_used: horizon,
        delta_declared: 0.0,
        noise_bound: 0.0,
        steps_taken: tr.steps,
        h_used: tr.h,
        formulation,
        samples: tr.samples.iter().map(|s| (s.t, s.state.norm())).collect(),
    }
}

/// Runs the integrator on `f_delta` with fixed `(a, T)` and extracts `Re(-i u(T))`.
pub fn dsm_solve(
    a_op: &SymmetricOperator,
    f_delta: &[f64],
    a: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<SolveReport> {
    let tr = rk4_propagate(a_op, f_delta, a, horizon, cfg)?;
    Ok(report(tr, Formulation::Standard, a, horizon))
}

/// Integrates the rotated system `v' = i(A+ia)v - i f_δ`, whose solution is
/// `-i u(t)` identically.
pub fn dsm_solve_vform(
    a_op: &SymmetricOperator,
    f_delta: &[f64],
    a: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<SolveReport> {
    let tr = vform_trajectory(a_op, f_delta, a, horizon, cfg)?;
    Ok(report(tr, Formulation::Rotated, a, horizon))
}

/// Raw trajectory of the rotated system.
pub fn vform_trajectory(
    a_op: &SymmetricOperator,
    f_delta: &[f64],
    a: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    if f_delta.len() != a_op.n() {
        return Err(Error::DimensionMismatch {
            expected: a_op.n(),
            got: f_delta.len(),
        });
    }
    let forcing = ComplexState::from(
        f_delta
            .iter()
            .map(|&x| Complex64::new(0.0, -x))
            .collect::<Vec<_>>(),
    );
    rk4_evolve(
        a_op,
        &ComplexState::zeros(a_op.n()),
        &forcing,
        a,
        horizon,
        cfg,
    )
}

/// Picks `(a, t)` from `schedule` for the declared noise level and solves.
pub fn dsm_solve_auto(
    a_op: &SymmetricOperator,
    f_delta: &[f64],
    delta: f64,
    schedule: &Schedule,
    cfg: &IntegratorConfig,
) -> Result<SolveReport> {
    let (a, t) = schedule.evaluate(delta)?;
    let mut rep = dsm_solve(a_op, f_delta, a, t, cfg)?;
    rep.delta_declared = delta;
    rep.noise_bound = noise_propagation_bound(delta, a)?;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::SpectralOracle;
    use approx::assert_relative_eq;

    #[test]
    fn identity_small_shift() {
        let a = SymmetricOperator::identity(2).unwrap();
        let rep = dsm_solve(&a, &[1.0, 0.0], 1e-3, 2e4, &IntegratorConfig::default()).unwrap();
        let err = ((rep.estimate[0] - 1.0).powi(2) + rep.estimate[1].powi(2)).sqrt();
        assert!(err <= 1.1e-3, "{err}");
        // Re(-i u) = 1/(1+a^2), Im = -a/(1+a^2)
        assert_relative_eq!(rep.estimate[0], 1.0 / (1.0 + 1e-6), max_relative = 1e-8);
        assert_relative_eq!(rep.imag_residue, 1e-3 / (1.0 + 1e-6), max_relative = 1e-5);
    }

    #[test]
    fn scalar_estimate() {
        let a = SymmetricOperator::diagonal(&[2.0]).unwrap();
        let rep = dsm_solve(&a, &[2.0], 0.1, 60.0, &IntegratorConfig::default()).unwrap();
        let u = SpectralOracle::new(&a)
            .unwrap()
            .closed_form_state(&[2.0], 0.1, 60.0)
            .unwrap();
        assert_relative_eq!(rep.estimate[0], u[0].im, epsilon = 1e-9);
        // complex error modulus bounded by bias + transient
        let modulus = ((rep.estimate[0] - 1.0).powi(2) + rep.imag_residue.powi(2)).sqrt();
        let bias = 0.1 / 4.01f64.sqrt();
        let transient = (-6.0f64).exp() * 2.0 / 4.01f64.sqrt();
        assert!(modulus <= bias + transient + 1e-9, "{modulus}");
        assert_relative_eq!(rep.estimate[0], 0.9975, epsilon = 5e-3);
    }

    #[test]
    fn zero_data_gives_zero_report() {
        let a = SymmetricOperator::diagonal(&[1.0, 3.0]).unwrap();
        for rep in [
            dsm_solve(&a, &[0.0, 0.0], 0.1, 5.0, &IntegratorConfig::default()).unwrap(),
            dsm_solve_vform(&a, &[0.0, 0.0], 0.1, 5.0, &IntegratorConfig::default()).unwrap(),
        ] {
            assert_eq!(rep.estimate, vec![0.0, 0.0]);
            assert_eq!(rep.imag_residue, 0.0);
        }
    }

    #[test]
    fn vform_matches_standard_bitwise() {
        let a = SymmetricOperator::from_lower_fn(3, |i, j| 1.0 / (1 + i + j) as f64).unwrap();
        let f = [0.3, -1.2, 0.7];
        let cfg = IntegratorConfig::default().with_sampling(50);
        let u = rk4_propagate(&a, &f, 0.05, 10.0, &cfg).unwrap();
        let v = vform_trajectory(&a, &f, 0.05, 10.0, &cfg).unwrap();
        assert_eq!(u.samples.len(), v.samples.len());
        let minus_i = Complex64::new(0.0, -1.0);
        for (su, sv) in u.samples.iter().zip(&v.samples) {
            assert_eq!(su.t, sv.t);
            assert_eq!(su.state.scale(minus_i), sv.state);
        }
    }

    #[test]
    fn vform_scalar_estimate() {
        let a = SymmetricOperator::diagonal(&[1.0]).unwrap();
        let cfg = IntegratorConfig::default();
        let v = dsm_solve_vform(&a, &[1.0], 0.1, 60.0, &cfg).unwrap();
        let u = dsm_solve(&a, &[1.0], 0.1, 60.0, &cfg).unwrap();
        assert_eq!(v.estimate, u.estimate);
        assert_eq!(v.imag_residue, u.imag_residue);
        let exact = SpectralOracle::new(&a)
            .unwrap()
            .closed_form_state(&[1.0], 0.1, 60.0)
            .unwrap();
        assert_relative_eq!(v.estimate[0], exact[0].im, epsilon = 1e-9);
        assert_relative_eq!(v.estimate[0], 0.990_099_0, epsilon = 3e-3);
    }

    #[test]
    fn auto_stamps_noise_bound() {
        let a = SymmetricOperator::diagonal(&[1.0]).unwrap();
        let rep = dsm_solve_auto(
            &a,
            &[1.0],
            1e-2,
            &Schedule::default(),
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(rep.a_used, 0.1, max_relative = 1e-15);
        assert_relative_eq!(rep.t_used, 46.051_701_859_880_91, max_relative = 1e-12);
        assert_eq!(rep.delta_declared, 1e-2);
        assert_eq!(rep.noise_bound, rep.delta_declared / rep.a_used);
        assert_relative_eq!(rep.noise_bound, 0.1, max_relative = 1e-15);
    }

    #[test]
    fn auto_zero_delta_hits_step_cap() {
        let a = SymmetricOperator::diagonal(&[1.0]).unwrap();
        let err = dsm_solve_auto(
            &a,
            &[1.0],
            0.0,
            &Schedule::default(),
            &IntegratorConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::MaxStepsExceeded { .. }), "{err}");
    }

    #[test]
    fn noise_bound_examples() {
        assert_relative_eq!(
            noise_propagation_bound(1e-3, 0.01).unwrap(),
            0.1,
            max_relative = 1e-15
        );
        assert_eq!(noise_propagation_bound(0.0, 0.3).unwrap(), 0.0);
        assert_eq!(noise_propagation_bound(0.5, 0.5).unwrap(), 1.0);
        assert!(noise_propagation_bound(0.5, 0.0).is_err());
        assert!(noise_propagation_bound(-0.5, 1.0).is_err());
    }

    #[test]
    fn samples_are_opt_in() {
        let a = SymmetricOperator::diagonal(&[1.0]).unwrap();
        let rep = dsm_solve(&a, &[1.0], 0.1, 1.0, &IntegratorConfig::fixed(0.1)).unwrap();
        assert!(rep.samples.is_empty());
        let rep = dsm_solve(
            &a,
            &[1.0],
            0.1,
            1.0,
            &IntegratorConfig::fixed(0.1).with_sampling(5),
        )
        .unwrap();
        assert_eq!(rep.samples.len(), 3);
        assert_eq!(rep.samples[0], (0.0, 0.0));
    }
}

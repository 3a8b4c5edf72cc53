//! Invariant suite: every property the solvers promise, checked on seeded
//! problems at desk scale. `dsm verify` prints the outcome table.

use num_complex::Complex64;

use crate::dsm::{
    dsm_solve, dsm_solve_auto, evolve_with, rk4_propagate, vform_trajectory, IntegratorConfig,
    Schedule, Tableau,
};
use crate::linops::{
    condition_number, matvec, norm2, sym_eigen, SymmetricOperator, DEFAULT_NULL_TOL,
};
use crate::oracle::SpectralOracle;
use crate::problems::{add_noise, gen_random_symmetric, gen_spectrum, noise_vector, SeededRng};
use crate::regbase::{tikhonov_functional, tikhonov_solve_default, DEFAULT_CG_TOL};
use crate::{ComplexState, Error, Result};

pub const MAX_SIZE_CAP: usize = 64;

/// Slack for integrator error in the bound checks.
pub const INTEGRATOR_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub size_cap: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            size_cap: 12,
        }
    }
}

pub fn run_suite(cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    run_suite_with(&Tableau::CLASSICAL, cfg)
}

type Check = (
    &'static str,
    &'static str,
    fn(&Ctx) -> Result<(bool, String)>,
);

struct Ctx<'a> {
    seed: u64,
    cap: usize,
    tableau: &'a Tableau,
}

impl Ctx<'_> {
    fn size(&self, preferred: usize) -> usize {
        preferred.min(self.cap).max(1)
    }

    fn seeds(&self, count: u64) -> impl Iterator<Item = u64> + '_ {
        let mut rng = SeededRng::new(self.seed);
        (0..count).map(move |_| rng.next_u64())
    }

    /// Eigenvalues `1, -1` then seeded values in `[-1, 1]`.
    fn unit_spectrum(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = SeededRng::new(seed ^ 0x5eed);
        (0..n)
            .map(|j| match j {
                0 => 1.0,
                1 => -1.0,
                _ => 2.0 * rng.uniform() - 1.0,
            })
            .collect()
    }
}

const CHECKS: &[Check] = &[
    ("linops", "eigen reconstruction", check_eigen_reconstruction),
    ("linops", "matvec linearity", check_matvec_linearity),
    (
        "linops",
        "condition scale invariance",
        check_condition_scaling,
    ),
    ("oracle", "spectral error identity", check_spectral_identity),
    (
        "oracle",
        "spectral error monotone in a",
        check_spectral_monotone,
    ),
    (
        "oracle",
        "spectral error vanishes as a -> 0",
        check_spectral_limit,
    ),
    (
        "oracle",
        "closed form large-t decay",
        check_closed_form_decay,
    ),
    ("dsm", "propagator decay", check_propagator_decay),
    (
        "dsm",
        "rk4 vs closed form (4th order)",
        check_oracle_equivalence,
    ),
    ("dsm", "noise bound delta/a", check_noise_bound),
    ("dsm", "error decomposition", check_decomposition),
    ("dsm", "v-form identity", check_vform),
    ("dsm", "schedule surrogates", check_schedule),
    ("regbase", "normal equation residual", check_cg_residual),
    ("regbase", "Tikhonov optimality", check_tikhonov_optimality),
    (
        "regbase",
        "DSM/Tikhonov agreement",
        check_dsm_tikhonov_agreement,
    ),
    ("problems", "problem invariants", check_problem_invariants),
    ("problems", "spectrum round trip", check_spectrum_round_trip),
    ("problems", "determinism", check_determinism),
    ("problems", "norm-exact noise", check_noise_norm),
];

pub(crate) fn run_suite_with(tableau: &Tableau, cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    if cfg.size_cap == 0 || cfg.size_cap > MAX_SIZE_CAP {
        return Err(Error::InvalidArgument(format!(
            "size cap must be in 1..={MAX_SIZE_CAP}, got {}",
            cfg.size_cap
        )));
    }
    let ctx = Ctx {
        seed: cfg.seed,
        cap: cfg.size_cap,
        tableau,
    };
    Ok(CHECKS
        .iter()
        .map(|&(module, name, check)| {
            let (passed, detail) = match check(&ctx) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckOutcome {
                module,
                name,
                passed,
                detail,
            }
        })
        .collect())
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

fn check_eigen_reconstruction(ctx: &Ctx) -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    let mut worst_orth = 0.0_f64;
    for (k, seed) in ctx.seeds(5).enumerate() {
        let n = ctx.size(4 + 2 * k);
        let a = gen_random_symmetric(n, seed)?;
        let e = sym_eigen(&a)?;
        let mut rebuilt = vec![0.0; n * n];
        for (l, v) in e.eigenvalues.iter().zip(&e.eigenvectors) {
            for i in 0..n {
                for j in 0..n {
                    rebuilt[i * n + j] += l * v[i] * v[j];
                }
            }
        }
        worst = worst.max(max_abs_diff(&rebuilt, a.as_slice()));
        worst_orth = worst_orth.max(e.orthonormality_defect());
        if e.residual_norm > 1e-10 * e.max_abs_eigenvalue().max(1.0) {
            return Ok((false, format!("residual {:e}", e.residual_norm)));
        }
    }
    Ok((
        worst <= 1e-9 && worst_orth <= 1e-10,
        format!("max |VΛVᵀ - A| = {worst:.2e}, max |VᵀV - I| = {worst_orth:.2e}"),
    ))
}

fn check_matvec_linearity(ctx: &Ctx) -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    for seed in ctx.seeds(5) {
        let n = ctx.size(12);
        let a = gen_random_symmetric(n, seed)?;
        let mut rng = SeededRng::new(seed);
        let x = ComplexState::from_parts(&rng.normals(n), &rng.normals(n))?;
        let y = ComplexState::from_parts(&rng.normals(n), &rng.normals(n))?;
        let (al, be) = (
            Complex64::new(rng.normal(), rng.normal()),
            Complex64::new(rng.normal(), 0.0),
        );
        let comb: Vec<Complex64> = x
            .as_slice()
            .iter()
            .zip(y.as_slice())
            .map(|(p, q)| al * p + be * q)
            .collect();
        let lhs = matvec(&a, &ComplexState::from(comb))?;
        let (ax, ay) = (matvec(&a, &x)?, matvec(&a, &y)?);
        let rhs: Vec<Complex64> = ax
            .as_slice()
            .iter()
            .zip(ay.as_slice())
            .map(|(p, q)| al * p + be * q)
            .collect();
        let rhs = ComplexState::from(rhs);
        worst = worst.max(lhs.distance(&rhs) / rhs.norm().max(1e-300));
    }
    Ok((
        worst <= 1e-12,
        format!("max relative deviation {worst:.2e}"),
    ))
}

fn check_condition_scaling(ctx: &Ctx) -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    for seed in ctx.seeds(4) {
        let n = ctx.size(6);
        let a = gen_random_symmetric(n, seed)?;
        let k = condition_number(&a, DEFAULT_NULL_TOL)?.value();
        for c in [-3.7, 1e-3, 250.0] {
            let kc = condition_number(&a.scaled(c), DEFAULT_NULL_TOL)?.value();
            worst = worst.max(((kc - k) / k).abs());
        }
    }
    Ok((worst <= 1e-12, format!("max relative change {worst:.2e}")))
}

/// Dense complex Gaussian elimination with partial pivoting on `(A + ia) x = b`.
fn solve_shifted_dense(a_op: &SymmetricOperator, shift: f64, b: &[f64]) -> Vec<Complex64> {
    let n = a_op.n();
    let mut m: Vec<Complex64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            Complex64::new(a_op.get(i, j), if i == j { shift } else { 0.0 })
        })
        .collect();
    let mut x: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&p, &q| m[p * n + col].norm().total_cmp(&m[q * n + col].norm()))
            .unwrap_or(col);
        if piv != col {
            for j in 0..n {
                m.swap(col * n + j, piv * n + j);
            }
            x.swap(col, piv);
        }
        let d = m[col * n + col];
        for r in (col + 1)..n {
            let factor = m[r * n + col] / d;
            for j in col..n {
                let v = m[col * n + j];
                m[r * n + j] -= factor * v;
            }
            let xc = x[col];
            x[r] -= factor * xc;
        }
    }
    for r in (0..n).rev() {
        let mut s = x[r];
        for j in (r + 1)..n {
            s -= m[r * n + j] * x[j];
        }
        x[r] = s / m[r * n + r];
    }
    x
}

fn check_spectral_identity(ctx: &Ctx) -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    for seed in ctx.seeds(3) {
        let n = ctx.size(8);
        let p = gen_spectrum(&ctx.unit_spectrum(n, seed), seed)?;
        let oracle = SpectralOracle::new(&p.a)?;
        let ay = p.a.apply_real(&p.y_true)?;
        for a in [1e-1, 1e-2, 1e-3] {
            let via_sum = oracle.spectral_error(&p.y_true, a)?;
            let x = solve_shifted_dense(&p.a, a, &ay);
            let direct = x
                .iter()
                .zip(&p.y_true)
                .map(|(xi, yi)| (xi - yi).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(((via_sum - direct) / direct).abs());
        }
    }
    Ok((worst <= 1e-10, format!("max relative mismatch {worst:.2e}")))
}

fn check_spectral_monotone(ctx: &Ctx) -> Result<(bool, String)> {
    let n = ctx.size(6);
    let p = gen_spectrum(&ctx.unit_spectrum(n, ctx.seed), ctx.seed)?;
    let oracle = SpectralOracle::new(&p.a)?;
    let grid: Vec<f64> = (0..10).map(|k| 10f64.powf(-4.0 + 0.5 * k as f64)).collect();
    let values: Vec<f64> = grid
        .iter()
        .map(|&a| oracle.spectral_error(&p.y_true, a))
        .collect::<Result<_>>()?;
    let ok = values.windows(2).all(|w| w[1] >= w[0]);
    Ok((
        ok,
        format!(
            "{:.2e} .. {:.2e} over a in [1e-4, 1e0.5]",
            values[0], values[9]
        ),
    ))
}

fn check_spectral_limit(ctx: &Ctx) -> Result<(bool, String)> {
    let n = ctx.size(5);
    let eig: Vec<f64> = (0..n)
        .map(|k| 10f64.powf(-2.0 * k as f64 / (n.max(2) - 1) as f64))
        .collect();
    let p = gen_spectrum(&eig, ctx.seed)?;
    let e = SpectralOracle::new(&p.a)?.spectral_error(&p.y_true, 1e-8)?;
    Ok((
        e <= 1e-6 * norm2(&p.y_true),
        format!("error at a = 1e-8: {e:.2e}"),
    ))
}

fn check_closed_form_decay(ctx: &Ctx) -> Result<(bool, String)> {
    let n = ctx.size(6);
    let p = gen_spectrum(&ctx.unit_spectrum(n, ctx.seed), ctx.seed)?;
    let oracle = SpectralOracle::new(&p.a)?;
    let mut ok = true;
    let mut worst = 0.0_f64;
    for (a, t) in [(0.1, 30.0), (0.5, 8.0), (1.0, 5.0)] {
        let u = oracle.closed_form_state(&p.f, a, t)?;
        let limit = oracle.stationary_state(&p.f, a)?;
        let bound = (-a * t).exp() * oracle.resolvent_norm(&p.f, a)? * (1.0 + 1e-12);
        let gap = u.distance(&limit);
        worst = worst.max(gap / bound);
        ok &= gap <= bound;
    }
    Ok((ok, format!("max gap / bound = {worst:.3}")))
}

fn check_propagator_decay(ctx: &Ctx) -> Result<(bool, String)> {
    let n = ctx.size(8);
    let mut worst_ratio = 0.0_f64;
    let mut worst_eig = 0.0_f64;
    for seed in ctx.seeds(3) {
        let a_op = gen_random_symmetric(n, seed)?;
        let mut rng = SeededRng::new(seed);
        let u0 = ComplexState::from_parts(&rng.normals(n), &rng.normals(n))?;
        let zero = ComplexState::zeros(n);
        let eig = sym_eigen(&a_op)?;
        let v0 = ComplexState::from_real(&eig.eigenvectors[n - 1]);
        for a in [0.1, 1.0] {
            for t in [1.0, 5.0, 20.0] {
                let cfg = IntegratorConfig::default();
                let tr = evolve_with(ctx.tableau, &a_op, &u0, &zero, a, t, &cfg)?;
                let h = tr.h;
                let allowed = (-a * t).exp() * (1.0 + 10.0 * h.powi(4) * t);
                worst_ratio = worst_ratio.max(tr.state.norm() / u0.norm() / allowed);
                let tv = evolve_with(ctx.tableau, &a_op, &v0, &zero, a, t, &cfg)?;
                let rel = (tv.state.norm() - (-a * t).exp()).abs() / (-a * t).exp();
                worst_eig = worst_eig.max(rel);
            }
        }
    }
    Ok((
        worst_ratio <= 1.0 && worst_eig <= 1e-6,
        format!("max ‖u(t)‖/(e^-at ‖u0‖ (1+10h⁴t)) = {worst_ratio:.6}, eigenvector deviation {worst_eig:.2e}"),
    ))
}

/// Error of the integrator against the closed form at `(a, T)` for steps `h` and `h/2`.
pub(crate) fn order_errors(
    tableau: &Tableau,
    a_op: &SymmetricOperator,
    f: &[f64],
    a: f64,
    horizon: f64,
    h: f64,
) -> Result<(f64, f64)> {
    let exact = SpectralOracle::new(a_op)?.closed_form_state(f, a, horizon)?;
    let zero = ComplexState::zeros(a_op.n());
    let forcing = ComplexState::from_real(f);
    let coarse = evolve_with(
        tableau,
        a_op,
        &zero,
        &forcing,
        a,
        horizon,
        &IntegratorConfig::fixed(h),
    )?;
    let fine = evolve_with(
        tableau,
        a_op,
        &zero,
        &forcing,
        a,
        horizon,
        &IntegratorConfig::fixed(h / 2.0),
    )?;
    Ok((coarse.state.distance(&exact), fine.state.distance(&exact)))
}

fn check_oracle_equivalence(ctx: &Ctx) -> Result<(bool, String)> {
    let n = ctx.size(10);
    let mut ok = true;
    let mut details = Vec::new();
    for (k, seed) in ctx.seeds(2).enumerate() {
        let p = gen_spectrum(&ctx.unit_spectrum(n, seed), seed)?;
        let fnorm = norm2(&p.f);
        let (a, horizon) = if k == 0 { (0.1, 10.0) } else { (0.01, 100.0) };
        let h = IntegratorConfig::default().step_size(&p.a, a)?;
        let (e1, e2) = order_errors(ctx.tableau, &p.a, &p.f, a, horizon, h)?;
        let ratio = e1 / e2;
        ok &= e1 <= 1e-8 * fnorm && (12.0..=20.0).contains(&ratio);
        details.push(format!("a={a}: err {:.2e}, ratio {ratio:.2}", e1 / fnorm));
    }
    Ok((ok, details.join("; ")))
}

fn check_noise_bound(ctx: &Ctx) -> Result<(bool, String)> {
    let n = ctx.size(6);
    let mut worst = 0.0_f64;
    for seed in ctx.seeds(3) {
        let p = gen_spectrum(&ctx.unit_spectrum(n, seed), seed)?;
        for (delta, a, horizon) in [(1e-2, 0.1, 30.0), (0.1, 0.1, 15.0)] {
            let noisy = add_noise(&p.f, delta, seed ^ 1)?;
            let cfg = IntegratorConfig::default();
            let clean = rk4_propagate(&p.a, &p.f, a, horizon, &cfg)?;
            let dirty = rk4_propagate(&p.a, &noisy.f_delta, a, horizon, &cfg)?;
            let bound = delta / a * (1.0 - (-a * horizon).exp());
            worst = worst.max(dirty.state.distance(&clean.state) / (bound + 1e-8));
        }
    }
    Ok((worst <= 1.0, format!("max ‖Δu‖/bound = {worst:.4}")))
}

fn check_decomposition(ctx: &Ctx) -> Result<(bool, String)> {
    let n = ctx.size(4);
    let eig: Vec<f64> = (0..n).map(|k| 10f64.powi(-(k as i32))).collect();
    let p = gen_spectrum(&eig, ctx.seed)?;
    let oracle = SpectralOracle::new(&p.a)?;
    let schedule = Schedule::default();
    let mut worst = 0.0_f64;
    for (k, delta) in [1e-2, 1e-3, 1e-4].into_iter().enumerate() {
        let noisy = add_noise(&p.f, delta, ctx.seed + k as u64)?;
        let rep = dsm_solve_auto(
            &p.a,
            &noisy.f_delta,
            delta,
            &schedule,
            &IntegratorConfig::default(),
        )?;
        let err = norm2(
            &rep.estimate
                .iter()
                .zip(&p.y_true)
                .map(|(x, y)| x - y)
                .collect::<Vec<_>>(),
        );
        let bound = oracle.spectral_error(&p.y_true, rep.a_used)?
            + rep.noise_bound
            + oracle.transient_bound(&p.f, rep.a_used, rep.t_used)?
            + INTEGRATOR_TOL;
        worst = worst.max(err / bound);
    }
    Ok((worst <= 1.0, format!("max error / bound = {worst:.4}")))
}

fn check_vform(ctx: &Ctx) -> Result<(bool, String)> {
    let n = ctx.size(6);
    let mut worst = 0.0_f64;
    let minus_i = Complex64::new(0.0, -1.0);
    for seed in ctx.seeds(3) {
        let p = gen_spectrum(&ctx.unit_spectrum(n, seed), seed)?;
        let cfg = IntegratorConfig::default().with_sampling(97);
        let u = rk4_propagate(&p.a, &p.f, 0.05, 25.0, &cfg)?;
        let v = vform_trajectory(&p.a, &p.f, 0.05, 25.0, &cfg)?;
        if u.samples.len() != v.samples.len() {
            return Ok((false, "sample counts differ".into()));
        }
        for (su, sv) in u.samples.iter().zip(&v.samples).skip(1) {
            worst = worst.max(su.state.scale(minus_i).distance(&sv.state) / su.state.norm());
        }
    }
    Ok((
        worst <= 1e-12,
        format!("max relative deviation {worst:.2e}"),
    ))
}

fn check_schedule(_ctx: &Ctx) -> Result<(bool, String)> {
    let s = Schedule::default();
    let failing: Vec<i32> = (1..=12)
        .filter(|&k| !s.satisfies_surrogates(10f64.powi(-k)))
        .collect();
    Ok((
        failing.is_empty(),
        format!("delta = 1e-1 .. 1e-12, failures: {failing:?}"),
    ))
}

fn check_cg_residual(ctx: &Ctx) -> Result<(bool, String)> {
    let n = ctx.size(8);
    let mut worst = 0.0_f64;
    for seed in ctx.seeds(3) {
        let p = gen_spectrum(&ctx.unit_spectrum(n, seed), seed)?;
        for a in [1e-1, 1e-2, 1e-3] {
            let rep = tikhonov_solve_default(&p.a, &p.f, a)?;
            // recompute independently of the solver's own residual
            let au = p.a.apply_real(&rep.estimate)?;
            let aau = p.a.apply_real(&au)?;
            let af = p.a.apply_real(&p.f)?;
            let r: Vec<f64> = aau
                .iter()
                .zip(&rep.estimate)
                .zip(&af)
                .map(|((x, u), b)| x + a * u - b)
                .collect();
            worst = worst.max(norm2(&r) / norm2(&af));
        }
    }
    Ok((
        worst <= DEFAULT_CG_TOL,
        format!("max relative residual {worst:.2e}"),
    ))
}

fn check_tikhonov_optimality(ctx: &Ctx) -> Result<(bool, String)> {
    let n = ctx.size(6);
    let p = gen_spectrum(&ctx.unit_spectrum(n, ctx.seed), ctx.seed)?;
    let noisy = add_noise(&p.f, 1e-2, ctx.seed)?;
    let a = 1e-2;
    let rep = tikhonov_solve_default(&p.a, &noisy.f_delta, a)?;
    let f0 = tikhonov_functional(&p.a, &noisy.f_delta, a, &rep.estimate)?;
    let mut rng = SeededRng::new(ctx.seed ^ 0xabc);
    let mut violations = 0;
    for k in 0..20 {
        let scale = 10f64.powi(-(k % 5) - 1);
        let w: Vec<f64> = rng.normals(n).iter().map(|x| x * scale).collect();
        let moved: Vec<f64> = rep.estimate.iter().zip(&w).map(|(u, d)| u + d).collect();
        if tikhonov_functional(&p.a, &noisy.f_delta, a, &moved)? < f0 - 1e-12 * f0.max(1.0) {
            violations += 1;
        }
    }
    Ok((
        violations == 0,
        format!("{violations}/20 perturbations decreased F"),
    ))
}

fn check_dsm_tikhonov_agreement(ctx: &Ctx) -> Result<(bool, String)> {
    let n = ctx.size(4);
    let eig: Vec<f64> = (0..n).map(|k| 1.0 - 0.5 * k as f64 / n as f64).collect();
    let p = gen_spectrum(&eig, ctx.seed)?;
    let mut gaps = Vec::new();
    for a in [1e-1, 1e-2, 1e-3] {
        let horizon = (1e10f64).ln() / a;
        let d = dsm_solve(&p.a, &p.f, a, horizon, &IntegratorConfig::default())?;
        let t = tikhonov_solve_default(&p.a, &p.f, a)?;
        gaps.push(norm2(
            &d.estimate
                .iter()
                .zip(&t.estimate)
                .map(|(x, y)| x - y)
                .collect::<Vec<_>>(),
        ));
    }
    let ok = gaps.windows(2).all(|w| w[1] <= 1.5 * w[0]) && gaps[2] < gaps[0];
    Ok((
        ok,
        format!(
            "‖dsm - tikhonov‖ = {:.2e}, {:.2e}, {:.2e}",
            gaps[0], gaps[1], gaps[2]
        ),
    ))
}

fn check_problem_invariants(ctx: &Ctx) -> Result<(bool, String)> {
    let n = ctx.size(6);
    let mut count = 0;
    for seed in ctx.seeds(4) {
        let mut eig = ctx.unit_spectrum(n, seed);
        if n > 2 {
            eig[n - 1] = 0.0;
        }
        gen_spectrum(&eig, seed)?.check_invariants()?;
        count += 1;
    }
    Ok((true, format!("{count} generated problems consistent")))
}

fn check_spectrum_round_trip(ctx: &Ctx) -> Result<(bool, String)> {
    let n = ctx.size(10);
    let mut worst = 0.0_f64;
    for seed in ctx.seeds(3) {
        let mut want = ctx.unit_spectrum(n, seed);
        let p = gen_spectrum(&want, seed)?;
        want.sort_by(f64::total_cmp);
        worst = worst.max(max_abs_diff(&sym_eigen(&p.a)?.eigenvalues, &want));
    }
    Ok((
        worst <= 1e-9,
        format!("max eigenvalue deviation {worst:.2e}"),
    ))
}

fn check_determinism(ctx: &Ctx) -> Result<(bool, String)> {
    let n = ctx.size(6);
    let eig = ctx.unit_spectrum(n, ctx.seed);
    let (p, q) = (gen_spectrum(&eig, ctx.seed)?, gen_spectrum(&eig, ctx.seed)?);
    let (x, y) = (add_noise(&p.f, 1e-3, 5)?, add_noise(&q.f, 1e-3, 5)?);
    let same = p.a == q.a
        && p.y_true
            .iter()
            .zip(&q.y_true)
            .all(|(a, b)| a.to_bits() == b.to_bits())
        && x.f_delta
            .iter()
            .zip(&y.f_delta)
            .all(|(a, b)| a.to_bits() == b.to_bits());
    Ok((same, "repeated generation is bitwise identical".into()))
}

fn check_noise_norm(ctx: &Ctx) -> Result<(bool, String)> {
    let n = ctx.size(8);
    let mut worst = 0.0_f64;
    for seed in ctx.seeds(5) {
        for delta in [1e-2, 1e-5, 1e-8] {
            let e = noise_vector(n, delta, seed);
            worst = worst.max((norm2(&e) - delta).abs() / delta);
        }
    }
    Ok((
        worst <= 1e-14,
        format!("max relative norm error {worst:.2e}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let out = run_suite(&VerifyConfig::default()).unwrap();
        assert!(out.len() >= 12);
        for c in &out {
            assert!(c.passed, "{} / {}: {}", c.module, c.name, c.detail);
        }
    }

    #[test]
    fn small_cap_passes() {
        for cap in [1, 2, 3] {
            let out = run_suite(&VerifyConfig {
                seed: 9,
                size_cap: cap,
            })
            .unwrap();
            for c in &out {
                assert!(
                    c.passed,
                    "cap {cap}: {} / {}: {}",
                    c.module, c.name, c.detail
                );
            }
        }
    }

    #[test]
    fn invalid_cap_rejected() {
        assert!(run_suite(&VerifyConfig {
            seed: 1,
            size_cap: 0
        })
        .is_err());
        assert!(run_suite(&VerifyConfig {
            seed: 1,
            size_cap: 65
        })
        .is_err());
    }

    #[test]
    fn perturbed_rk4_coefficient_is_caught() {
        let mut bad = Tableau::CLASSICAL;
        bad.b[0] += 1e-4;
        bad.b[3] -= 1e-4;
        let out = run_suite_with(&bad, &VerifyConfig::default()).unwrap();
        let eq = out
            .iter()
            .find(|c| c.name.starts_with("rk4 vs closed form"))
            .unwrap();
        assert!(!eq.passed, "{}", eq.detail);
    }

    #[test]
    fn public_evolve_matches_tableau_path() {
        use crate::dsm::rk4_evolve;
        let a = gen_random_symmetric(3, 4).unwrap();
        let u0 = ComplexState::from_real(&[1.0, 0.0, -1.0]);
        let g = ComplexState::from_real(&[0.5, 0.5, 0.5]);
        let cfg = IntegratorConfig::default();
        let x = rk4_evolve(&a, &u0, &g, 0.3, 2.0, &cfg).unwrap();
        let y = evolve_with(&Tableau::CLASSICAL, &a, &u0, &g, 0.3, 2.0, &cfg).unwrap();
        assert_eq!(x.state, y.state);
    }
}

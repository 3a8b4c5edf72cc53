//! Classical fourth-order Runge–Kutta for `u' = i(A + ia) u + g`.
//!
//! The generator `B = i(A + ia)` has eigenvalues `-a + iλ_j`, which sit just left
//! of the imaginary axis. RK4's stability region covers that strip out to
//! `|hμ| ≈ 2.83`, so a fixed step below `2.8 / sqrt(ρ² + a²)` is stable. The right-hand
//! side touches `A` only through matrix-vector products.

use num_complex::Complex64;

use crate::linops::{spectral_radius_estimate, SymmetricOperator};
use crate::{ComplexState, Error, Result};

/// Hard stability limit on `h · sqrt(ρ̂² + a²)`.
pub const STABILITY_LIMIT: f64 = 2.8;

/// Target of the automatic step rule on `h · sqrt(ρ̂² + a²)`.
pub const AUTO_STEP_PRODUCT: f64 = 2.5;

/// Default cap on the automatic step.
pub const DEFAULT_H_MAX: f64 = 0.01;

pub const DEFAULT_MAX_STEPS: u64 = 500_000_000;

/// Power iterations used for the step-size radius estimate.
pub const RADIUS_ITERS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepRule {
    /// Use exactly this step (checked against the stability limit).
    Fixed(f64),
    /// `h = min(h_max, 2.5 / sqrt(ρ̂² + a²))`.
    Auto { h_max: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub step: StepRule,
    /// Record the state every `sample_stride` steps; 0 records nothing.
    pub sample_stride: usize,
    pub max_steps: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step: StepRule::Auto {
                h_max: DEFAULT_H_MAX,
            },
            sample_stride: 0,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

impl IntegratorConfig {
    pub fn fixed(h: f64) -> Self {
        Self {
            step: StepRule::Fixed(h),
            ..Self::default()
        }
    }

    pub fn auto(h_max: f64) -> Self {
        Self {
            step: StepRule::Auto { h_max },
            ..Self::default()
        }
    }

    pub fn with_sampling(mut self, stride: usize) -> Self {
        self.sample_stride = stride;
        self
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps;
        self
    }

    /// Resolves the step for a given operator and shift, enforcing stability.
    pub fn step_size(&self, a_op: &SymmetricOperator, a: f64) -> Result<f64> {
        let rho = spectral_radius_estimate(a_op, RADIUS_ITERS);
        let scale = (rho * rho + a * a).sqrt();
        let h = match self.step {
            StepRule::Fixed(h) => h,
            StepRule::Auto { h_max } => {
                if !(h_max > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "h_max must be positive, got {h_max}"
                    )));
                }
                if scale > 0.0 {
                    h_max.min(AUTO_STEP_PRODUCT / scale)
                } else {
                    h_max
                }
            }
        };
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "step must be positive, got {h}"
            )));
        }
        if h * scale > STABILITY_LIMIT {
            return Err(Error::UnstableStep {
                h,
                product: h * scale,
                limit: STABILITY_LIMIT,
            });
        }
        Ok(h)
    }
}

/// Butcher weights of an explicit four-stage scheme with a diagonal tableau.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Tableau {
    /// Stage offsets for stages 2..4 (each stage uses only the previous slope).
    pub(crate) c: [f64; 3],
    pub(crate) b: [f64; 4],
}

impl Tableau {
    pub(crate) const CLASSICAL: Tableau = Tableau {
        c: [0.5, 0.5, 1.0],
        b: [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
    };
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub t: f64,
    pub state: ComplexState,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub state: ComplexState,
    pub samples: Vec<Sample>,
    pub steps: u64,
    pub h: f64,
}

/// Integrates `u' = i(A + ia) u + f` from `u(0) = 0` to `t = horizon`.
pub fn rk4_propagate(
    a_op: &SymmetricOperator,
    f: &[f64],
    a: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    check_len(a_op, f.len())?;
    let u0 = ComplexState::zeros(a_op.n());
    rk4_evolve(a_op, &u0, &ComplexState::from_real(f), a, horizon, cfg)
}

/// Integrates `u' = i(A + ia) u + g` from an arbitrary start `u0` with complex forcing `g`.
pub fn rk4_evolve(
    a_op: &SymmetricOperator,
    u0: &ComplexState,
    forcing: &ComplexState,
    a: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    evolve_with(&Tableau::CLASSICAL, a_op, u0, forcing, a, horizon, cfg)
}

fn check_len(a_op: &SymmetricOperator, got: usize) -> Result<()> {
    if got != a_op.n() {
        return Err(Error::DimensionMismatch {
            expected: a_op.n(),
            got,
        });
    }
    Ok(())
}

/// `k = i(A u + ia u) + g = i·Au - a·u + g`, written so that replacing `u`
/// and `g` by `-i u` and `-i g` yields exactly `-i k` in floating point.
#[inline]
fn rhs(
    a_op: &SymmetricOperator,
    a: f64,
    u: &[Complex64],
    g: &[Complex64],
    au: &mut [Complex64],
    k: &mut [Complex64],
) {
    a_op.apply_complex_into(u, au);
    for (((kj, auj), uj), gj) in k.iter_mut().zip(au.iter()).zip(u).zip(g) {
        *kj = Complex64::new(-auj.im - a * uj.re + gj.re, auj.re - a * uj.im + gj.im);
    }
}

pub(crate) fn evolve_with(
    tab: &Tableau,
    a_op: &SymmetricOperator,
    u0: &ComplexState,
    forcing: &ComplexState,
    a: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    check_len(a_op, u0.len())?;
    check_len(a_op, forcing.len())?;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "shift a must be positive, got {a}"
        )));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "horizon T must be positive, got {horizon}"
        )));
    }
    if cfg.max_steps == 0 {
        return Err(Error::InvalidArgument(
            "max_steps must be at least 1".into(),
        ));
    }
    let h = cfg.step_size(a_op, a)?;

    let ratio = horizon / h;
    if ratio >= cfg.max_steps as f64 + 1.0 {
        return Err(Error::MaxStepsExceeded {
            needed: ratio.ceil().min(u64::MAX as f64) as u64,
            max_steps: cfg.max_steps,
            horizon,
        });
    }
    let mut full_steps = ratio.floor() as u64;
    // A remainder below 1e-9·h is roundoff in T/h, not a real partial step.
    let mut last = horizon - full_steps as f64 * h;
    if last < 0.0 {
        full_steps -= 1;
        last = horizon - full_steps as f64 * h;
    }
    let partial = last > 1e-9 * h;
    if !partial && full_steps == 0 {
        full_steps = 1;
    }
    let total = full_steps + u64::from(partial);
    if total > cfg.max_steps {
        return Err(Error::MaxStepsExceeded {
            needed: total,
            max_steps: cfg.max_steps,
            horizon,
        });
    }

    let n = a_op.n();
    let zero = Complex64::new(0.0, 0.0);
    let mut u = u0.as_slice().to_vec();
    let g = forcing.as_slice();
    let mut au = vec![zero; n];
    let mut tmp = vec![zero; n];
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];

    let mut samples = Vec::new();
    let stride = cfg.sample_stride as u64;
    if stride > 0 {
        samples.push(Sample {
            t: 0.0,
            state: ComplexState::from(u.clone()),
        });
    }

    let mut step = |u: &mut [Complex64], dt: f64| {
        rhs(a_op, a, u, g, &mut au, &mut k1);
        for ((t, &x), &k) in tmp.iter_mut().zip(u.iter()).zip(&k1) {
            *t = x + k * (dt * tab.c[0]);
        }
        rhs(a_op, a, &tmp, g, &mut au, &mut k2);
        for ((t, &x), &k) in tmp.iter_mut().zip(u.iter()).zip(&k2) {
            *t = x + k * (dt * tab.c[1]);
        }
        rhs(a_op, a, &tmp, g, &mut au, &mut k3);
        for ((t, &x), &k) in tmp.iter_mut().zip(u.iter()).zip(&k3) {
            *t = x + k * (dt * tab.c[2]);
        }
        rhs(a_op, a, &tmp, g, &mut au, &mut k4);
        for (j, x) in u.iter_mut().enumerate() {
            let incr = k1[j] * tab.b[0] + k2[j] * tab.b[1] + k3[j] * tab.b[2] + k4[j] * tab.b[3];
            *x += incr * dt;
        }
    };

    let (mut steps, mut t) = (0u64, 0.0);
    for s in 1..=full_steps {
        let dt = if !partial && s == full_steps {
            horizon - (s - 1) as f64 * h
        } else {
            h
        };
        step(&mut u, dt);
        steps = s;
        t = if !partial && s == full_steps {
            horizon
        } else {
            s as f64 * h
        };
        if stride > 0 && s % stride == 0 {
            samples.push(Sample {
                t,
                state: ComplexState::from(u.clone()),
            });
        }
    }
    if partial {
        step(&mut u, horizon - full_steps as f64 * h);
        steps += 1;
        t = horizon;
        if stride > 0 && steps % stride == 0 {
            samples.push(Sample {
                t,
                state: ComplexState::from(u.clone()),
            });
        }
    }
    if stride > 0 && samples.last().is_none_or(|s| s.t != t) {
        samples.push(Sample {
            t,
            state: ComplexState::from(u.clone()),
        });
    }

    Ok(Trajectory {
        state: ComplexState::from(u),
        samples,
        steps,
        h,
    })
}

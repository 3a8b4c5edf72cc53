//! Batch front end for `dsm-core`: single solves, δ-sweep benchmarks written
//! as CSV, and the invariant verification suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use dsm_core::dsm::{dsm_solve, dsm_solve_vform, IntegratorConfig, Schedule, SolveReport};
use dsm_core::oracle::SpectralOracle;
use dsm_core::problems::{
    add_noise, gen_hilbert, gen_spectrum, problem_from_operator, read_matrix_market, read_vector,
    Problem, MAX_HILBERT_N,
};
use dsm_core::regbase::tikhonov_solve_default;
use dsm_core::verify::{run_suite, VerifyConfig, INTEGRATOR_TOL};
use dsm_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Column order of the benchmark CSV.
pub const CSV_HEADER: [&str; 11] = [
    "delta",
    "a",
    "t",
    "method",
    "error_vs_ytrue",
    "noise_bound",
    "spectral_err",
    "transient_bound",
    "wall_time_s",
    "steps_or_iters",
    "status",
];

#[derive(Parser, Debug)]
#[command(
    name = "dsm",
    version,
    about = "Dynamical-systems solver for ill-conditioned symmetric systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve A u = f for one matrix and right-hand side.
    Solve(SolveArgs),
    /// Sweep noise levels on a generated problem and write a CSV table.
    Bench(BenchArgs),
    /// Run the invariant checks of every module.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Dsm,
    #[value(name = "dsm-v")]
    DsmV,
    Tikhonov,
    Oracle,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Dsm => "dsm",
            Method::DsmV => "dsm-v",
            Method::Tikhonov => "tikhonov",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    /// Matrix Market file holding A.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Right-hand side vector (Matrix Market array or plain text).
    #[arg(long)]
    pub rhs: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Dsm)]
    pub method: Method,
    /// Declared noise level of the right-hand side.
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    /// `default` or `custom:a=...,t=...`
    #[arg(long)]
    pub schedule: Option<Schedule>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    /// `hilbert:N` or `spectrum:l1,l2,...`
    #[arg(long)]
    pub generator: Generator,
    /// Comma-separated noise levels.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub deltas: Vec<f64>,
    #[arg(long, default_value = "default")]
    pub schedule: Schedule,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "dsm,tikhonov"
    )]
    pub methods: Vec<Method>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub csv: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = VerifyConfig::default().seed)]
    pub seed: u64,
    #[arg(long, default_value_t = VerifyConfig::default().size_cap)]
    pub size_cap: usize,
}

/// Problem family for `bench`.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Hilbert(usize),
    Spectrum(Vec<f64>),
}

impl FromStr for Generator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| format!("expected hilbert:N or spectrum:l1,l2,..., got '{s}'"))?;
        match kind.trim() {
            "hilbert" => {
                let n: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad size '{rest}'"))?;
                if n == 0 || n > MAX_HILBERT_N {
                    return Err(format!("hilbert size must be in 1..={MAX_HILBERT_N}"));
                }
                Ok(Generator::Hilbert(n))
            }
            "spectrum" => {
                let values = rest
                    .split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<f64>()
                            .map_err(|_| format!("bad eigenvalue '{v}'"))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if values.iter().any(|v| !v.is_finite()) {
                    return Err("eigenvalues must be finite".into());
                }
                Ok(Generator::Spectrum(values))
            }
            other => Err(format!("unknown generator '{other}'")),
        }
    }
}

impl Generator {
    pub fn build(&self, seed: u64) -> dsm_core::Result<Problem> {
        match self {
            Generator::Hilbert(n) => {
                problem_from_operator(gen_hilbert(*n)?, seed, format!("hilbert({n})"))
            }
            Generator::Spectrum(values) => gen_spectrum(values, seed),
        }
    }
}

/// Parses arguments and dispatches; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Verify(args) => cmd_verify(args.seed, args.size_cap),
    }
}

enum Failure {
    Input(anyhow::Error),
    Solver(anyhow::Error),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Solver(_) => EXIT_SOLVER,
        }
    }

    fn report(self) -> i32 {
        let code = self.code();
        let (Failure::Input(e) | Failure::Solver(e)) = self;
        eprintln!("error: {e:#}");
        code
    }
}

fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::DimensionMismatch { .. }
            | Error::NotSymmetric { .. }
            | Error::InvalidArgument(_)
            | Error::InvalidSchedule { .. }
            | Error::Parse { .. }
            | Error::Io { .. }
    )
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if is_input_error(&e) {
            Failure::Input(e.into())
        } else {
            Failure::Solver(e.into())
        }
    }
}

fn input(msg: impl fmt::Display) -> Failure {
    Failure::Input(anyhow::anyhow!("{msg}"))
}

/// Solves one system and writes the estimate with a `#` report header to `out`.
pub fn cmd_solve(args: &SolveArgs) -> i32 {
    match solve(args) {
        Ok(()) => EXIT_OK,
        Err(f) => f.report(),
    }
}

fn dsm_parameters(args: &SolveArgs) -> Result<(f64, f64), Failure> {
    match (args.a, args.t, &args.schedule) {
        (Some(a), Some(t), None) => Ok((a, t)),
        (None, None, Some(s)) => Ok(s.evaluate(args.delta)?),
        _ => Err(input(
            "dsm methods need either both --a and --t, or --schedule",
        )),
    }
}

fn solve(args: &SolveArgs) -> Result<(), Failure> {
    if !(args.delta >= 0.0) || !args.delta.is_finite() {
        return Err(input(format!(
            "--delta must be a finite value >= 0, got {}",
            args.delta
        )));
    }
    let a_op = read_matrix_market(&args.matrix)?;
    let f = read_vector(&args.rhs)?;
    if f.len() != a_op.n() {
        return Err(Error::DimensionMismatch {
            expected: a_op.n(),
            got: f.len(),
        }
        .into());
    }

    let mut lines = vec![
        format!("method = {}", args.method),
        format!("n = {}", a_op.n()),
        format!("delta = {:e}", args.delta),
    ];
    let estimate = match args.method {
        Method::Dsm | Method::DsmV => {
            let (a, t) = dsm_parameters(args)?;
            let cfg = IntegratorConfig::default();
            let rep = if args.method == Method::Dsm {
                dsm_solve(&a_op, &f, a, t, &cfg)?
            } else {
                dsm_solve_vform(&a_op, &f, a, t, &cfg)?
            };
            lines.extend(dsm_lines(&rep, args.delta));
            rep.estimate
        }
        Method::Tikhonov => {
            let a = match (args.a, &args.schedule) {
                (Some(a), None) => a,
                (None, Some(s)) => s.evaluate(args.delta)?.0,
                _ => return Err(input("tikhonov needs exactly one of --a or --schedule")),
            };
            let rep = tikhonov_solve_default(&a_op, &f, a)?;
            if !rep.converged {
                return Err(Failure::Solver(anyhow::anyhow!(
                    "CG stopped after {} iterations at relative residual {:e}",
                    rep.cg_iterations,
                    rep.cg_residual
                )));
            }
            lines.push(format!("a = {:e}", rep.a_used));
            lines.push(format!("cg_iterations = {}", rep.cg_iterations));
            lines.push(format!("cg_residual = {:e}", rep.cg_residual));
            rep.estimate
        }
        Method::Oracle => {
            let sol = SpectralOracle::new(&a_op)?.minimal_norm_solution(&f)?;
            if !sol.in_range() {
                eprintln!(
                    "warning: right-hand side has a null-space component of norm {:e}; it was dropped",
                    sol.range_residual
                );
            }
            lines.push(format!("rank = {}", sol.rank));
            lines.push(format!("range_residual = {:e}", sol.range_residual));
            sol.y
        }
    };
    write_solution(&args.out, &lines, &estimate).map_err(Failure::Input)
}

fn dsm_lines(rep: &SolveReport, delta: f64) -> Vec<String> {
    vec![
        format!("a = {:e}", rep.a_used),
        format!("t = {:e}", rep.t_used),
        format!("h = {:e}", rep.h_used),
        format!("steps = {}", rep.steps_taken),
        format!("imag_residue = {:e}", rep.imag_residue),
        format!("noise_bound = {:e}", delta / rep.a_used),
    ]
}

/// Matrix Market array with `%` report lines for `.mtx` paths, `#`-commented
/// plain text otherwise; both forms read back with `read_vector`.
fn write_solution(path: &Path, report: &[String], v: &[f64]) -> anyhow::Result<()> {
    let mm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("mtx"));
    let mut body = String::new();
    if mm {
        body.push_str("%%MatrixMarket matrix array real general\n");
    }
    let mark = if mm { '%' } else { '#' };
    for l in report {
        body.push_str(&format!("{mark} {l}\n"));
    }
    if mm {
        body.push_str(&format!("{} 1\n", v.len()));
    }
    for x in v {
        body.push_str(&format!("{x:.16e}\n"));
    }
    write_atomic(path, body.as_bytes())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// One benchmark row. Columns that do not apply to a method are `None` and
/// written as empty fields.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    pub a: Option<f64>,
    pub t: Option<f64>,
    pub method: Method,
    pub error_vs_ytrue: Option<f64>,
    pub noise_bound: Option<f64>,
    pub spectral_err: Option<f64>,
    pub transient_bound: Option<f64>,
    pub wall_time_s: f64,
    pub steps_or_iters: Option<u64>,
    pub status: RowStatus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// The error exceeds the sum of the bound columns plus the integrator tolerance.
    Fail,
    /// The solver returned an error.
    Failed(String),
}

impl RowStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RowStatus::Ok => "OK",
            RowStatus::Fail => "FAIL",
            RowStatus::Failed(_) => "FAILED",
        }
    }
}

impl SweepRow {
    /// Sum of the bound columns plus the integrator tolerance.
    pub fn bound(&self) -> f64 {
        self.noise_bound.unwrap_or(0.0)
            + self.spectral_err.unwrap_or(0.0)
            + self.transient_bound.unwrap_or(0.0)
            + INTEGRATOR_TOL
    }

    fn record(&self) -> Vec<String> {
        let num = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        vec![
            format!("{:e}", self.delta),
            num(self.a),
            num(self.t),
            self.method.to_string(),
            num(self.error_vs_ytrue),
            num(self.noise_bound),
            num(self.spectral_err),
            num(self.transient_bound),
            format!("{:.6}", self.wall_time_s),
            self.steps_or_iters
                .map(|s| s.to_string())
                .unwrap_or_default(),
            self.status.label().to_string(),
        ]
    }
}

fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt()
}

struct BenchCase<'a> {
    problem: &'a Problem,
    oracle: &'a SpectralOracle,
    schedule: &'a Schedule,
}

impl BenchCase<'_> {
    fn row(&self, delta: f64, f_delta: &[f64], method: Method) -> SweepRow {
        let start = Instant::now();
        let mut row = SweepRow {
            delta,
            a: None,
            t: None,
            method,
            error_vs_ytrue: None,
            noise_bound: None,
            spectral_err: None,
            transient_bound: None,
            wall_time_s: 0.0,
            steps_or_iters: None,
            status: RowStatus::Ok,
        };
        if let Err(e) = self.fill(&mut row, f_delta) {
            row.status = RowStatus::Failed(e.to_string());
        } else if let Some(err) = row.error_vs_ytrue {
            if !(err <= row.bound()) {
                row.status = RowStatus::Fail;
            }
        }
        row.wall_time_s = start.elapsed().as_secs_f64();
        row
    }

    fn fill(&self, row: &mut SweepRow, f_delta: &[f64]) -> dsm_core::Result<()> {
        let y = &self.problem.y_true;
        let delta = row.delta;
        match row.method {
            Method::Dsm | Method::DsmV => {
                let (a, t) = self.schedule.evaluate(delta)?;
                row.a = Some(a);
                row.t = Some(t);
                row.noise_bound = Some(delta / a);
                row.spectral_err = Some(self.oracle.spectral_error(y, a)?);
                row.transient_bound = Some(self.oracle.transient_bound(&self.problem.f, a, t)?);
                let cfg = IntegratorConfig::default();
                let rep = if row.method == Method::Dsm {
                    dsm_solve(&self.problem.a, f_delta, a, t, &cfg)?
                } else {
                    dsm_solve_vform(&self.problem.a, f_delta, a, t, &cfg)?
                };
                row.steps_or_iters = Some(rep.steps_taken);
                row.error_vs_ytrue = Some(distance(&rep.estimate, y));
            }
            Method::Tikhonov => {
                let (a, _) = self.schedule.evaluate(delta)?;
                row.a = Some(a);
                // ‖(A² + aI)⁻¹ A‖ ≤ 1/(2√a)
                row.noise_bound = Some(delta / (2.0 * a.sqrt()));
                row.spectral_err = Some(self.oracle.tikhonov_bias(y, a)?);
                let rep = tikhonov_solve_default(&self.problem.a, f_delta, a)?;
                row.steps_or_iters = Some(rep.cg_iterations as u64);
                if !rep.converged {
                    return Err(Error::Degenerate(format!(
                        "CG did not converge (relative residual {:e})",
                        rep.cg_residual
                    )));
                }
                row.error_vs_ytrue = Some(distance(&rep.estimate, y));
            }
            Method::Oracle => {
                let lambda_min = self
                    .oracle
                    .smallest_nonzero_eigenvalue()
                    .ok_or_else(|| Error::Degenerate("operator is numerically zero".into()))?;
                row.noise_bound = Some(delta / lambda_min);
                row.spectral_err = Some(0.0);
                let sol = self.oracle.minimal_norm_solution(f_delta)?;
                row.error_vs_ytrue = Some(distance(&sol.y, y));
            }
        }
        Ok(())
    }
}

/// Builds the problem, perturbs `f` once per noise level and runs every
/// method on it. Rows come back ordered by (δ, method) in argument order.
pub fn run_bench(args: &BenchArgs) -> anyhow::Result<Vec<SweepRow>> {
    anyhow::ensure!(!args.deltas.is_empty(), "the delta list is empty");
    anyhow::ensure!(!args.methods.is_empty(), "the method list is empty");
    for &d in &args.deltas {
        anyhow::ensure!(
            d >= 0.0 && d.is_finite(),
            "noise levels must be finite and >= 0, got {d}"
        );
    }
    let problem = args.generator.build(args.seed)?;
    let oracle = SpectralOracle::new(&problem.a)?;
    let case = BenchCase {
        problem: &problem,
        oracle: &oracle,
        schedule: &args.schedule,
    };

    let mut noise_seeds = dsm_core::problems::SeededRng::new(args.seed);
    let noisy: Vec<Vec<f64>> = args
        .deltas
        .iter()
        .map(|&d| add_noise(&problem.f, d, noise_seeds.next_u64()).map(|n| n.f_delta))
        .collect::<dsm_core::Result<_>>()?;

    let jobs: Vec<(usize, Method)> = (0..args.deltas.len())
        .flat_map(|k| args.methods.iter().map(move |&m| (k, m)))
        .collect();
    Ok(jobs
        .par_iter()
        .map(|&(k, m)| case.row(args.deltas[k], &noisy[k], m))
        .collect())
}

pub fn write_csv(rows: &[SweepRow], path: &Path) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    write_atomic(path, &bytes)
}

/// Runs a sweep and writes its CSV. Exit 1 if any row is flagged.
pub fn cmd_bench(args: &BenchArgs) -> i32 {
    let rows = match run_bench(args) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_INPUT;
        }
    };
    if let Err(e) = write_csv(&rows, &args.csv) {
        eprintln!("error: {e:#}");
        return EXIT_INPUT;
    }
    let mut code = EXIT_OK;
    for r in &rows {
        match &r.status {
            RowStatus::Ok => {}
            RowStatus::Fail => {
                eprintln!(
                    "FAIL: delta={:e} method={} error={:e} > bound={:e}",
                    r.delta,
                    r.method,
                    r.error_vs_ytrue.unwrap_or(f64::NAN),
                    r.bound()
                );
                code = EXIT_FAILURE;
            }
            RowStatus::Failed(msg) => {
                eprintln!("FAILED: delta={:e} method={}: {msg}", r.delta, r.method);
                code = EXIT_FAILURE;
            }
        }
    }
    code
}

/// Prints the check table. Exit 0 iff every check passes, 2 for a bad cap.
pub fn cmd_verify(seed: u64, size_cap: usize) -> i32 {
    let outcomes = match run_suite(&VerifyConfig { seed, size_cap }) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    let mut failed = 0;
    for o in &outcomes {
        let mark = if o.passed { "PASS" } else { "FAIL" };
        println!("{mark}  {:<9} {:<width$}  {}", o.module, o.name, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    println!("{} checks, {} failed", outcomes.len(), failed);
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

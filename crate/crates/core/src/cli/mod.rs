//! Command-line driver: `solve`, `reproduce` and `rates`.
//!
//! Exit status is 0 on success, 2 for parse and domain errors and 3 for
//! solver failures.

mod problem;

pub use problem::{BlockSpec, Bound, ProblemFile, SetSpec, SolutionFile};

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::model::DualPoint;
use crate::oracle::{nonlinear_dual_solution, nonlinear_instance, tight_instance, RecurrenceState};
use crate::rates::{
    fit_linear_ratio_above, fit_path_exponent, fit_power_law, gap_noise_floor, read_history_csv,
    write_rate_report_csv, History, RateReport,
};
use crate::solver::{solve_observed, solve_with, write_history_csv, Reference, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dykstra-msf", version, about = "Dykstra-type projection for multi-set split feasibility")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a problem file.
    Solve(SolveArgs),
    /// Rerun one of the built-in examples.
    Reproduce(ReproduceArgs),
    /// Fit a convergence rate to a history CSV.
    Rates(RatesArgs),
}

#[derive(Debug, clap::Args)]
struct SolveArgs {
    problem: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    max_sweeps: usize,
    #[arg(long, default_value_t = 1e-10)]
    step_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    residual_tol: f64,
    #[arg(long, default_value_t = 1)]
    record_every: usize,
    #[arg(long)]
    history_out: Option<PathBuf>,
    /// Optimal dual value; enables the gap column.
    #[arg(long, allow_negative_numbers = true)]
    dstar: Option<f64>,
    /// Append x_0.. columns to the history.
    #[arg(long)]
    emit_x: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Example {
    /// p-ball example where the gap grows like ε^(p/(p-1)).
    Tight,
    /// Cone/hyperplane example with sublinear convergence.
    Nonlinear,
}

#[derive(Debug, clap::Args)]
struct ReproduceArgs {
    example: Example,
    #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
    p: f64,
    #[arg(long)]
    sweeps: Option<usize>,
    /// Write the sweep history here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Linear,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Column {
    Gap,
    Dist,
    DistSq,
    Step,
    Residual,
}

impl Column {
    fn name(self) -> &'static str {
        match self {
            Self::Gap => "gap",
            Self::Dist => "dist_argmin",
            Self::DistSq => "dist_argmin^2",
            Self::Step => "step_norm",
            Self::Residual => "residual_norm",
        }
    }
}

#[derive(Debug, clap::Args)]
struct RatesArgs {
    history: PathBuf,
    #[arg(long, value_enum, default_value = "linear")]
    mode: Mode,
    /// Leading rows excluded from a power-law fit.
    #[arg(long, default_value_t = 0)]
    skip: usize,
    /// Series to fit; defaults to the gap when present, else step_norm.
    #[arg(long, value_enum)]
    column: Option<Column>,
    /// Write the report as CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = write!(stderr, "{}", e.render());
            return EXIT_INPUT;
        }
        Err(e) => {
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => cmd_solve(&a, stdout),
        Command::Reproduce(a) => cmd_reproduce(&a, stdout),
        Command::Rates(a) => cmd_rates(&a, stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure { code, error }) => {
            let _ = writeln!(stderr, "error: {error}");
            code
        }
    }
}

/// An error together with the exit status it maps to.
struct Failure {
    code: i32,
    error: Error,
}

impl Failure {
    fn solver(error: Error) -> Self {
        Self {
            code: EXIT_SOLVER,
            error,
        }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Self {
            code: EXIT_INPUT,
            error,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Error::InvalidArgument(message.into()).into()
}

type Outcome = std::result::Result<(), Failure>;

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", parts.join(", "))
}

fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Outcome {
    let inst = ProblemFile::read(&args.problem)?.to_instance()?;
    let cfg = SolverConfig {
        max_sweeps: args.max_sweeps,
        step_tol: args.step_tol,
        residual_tol: args.residual_tol,
        record_every: args.record_every,
        assert_descent: false,
    };
    if args.max_sweeps == 0 || args.record_every == 0 {
        return Err(invalid("--max-sweeps and --record-every must be positive"));
    }
    if !(args.step_tol >= 0.0 && args.residual_tol >= 0.0) {
        return Err(invalid("tolerances must be nonnegative"));
    }
    let reference = Reference {
        d_star: args.dstar,
        dual_solution: None,
    };
    let res = solve_with(&inst, &cfg, &reference).map_err(Failure::solver)?;
    if let Some(path) = &args.history_out {
        write_history_csv(&res.history, create(path)?, args.emit_x)?;
    }
    writeln!(out, "termination: {}", res.termination)?;
    writeln!(out, "sweeps: {}", res.sweeps)?;
    writeln!(out, "x: {}", fmt_vec(&res.x))?;
    writeln!(out, "max_infeasibility: {:e}", inst.max_infeasibility(&res.x)?)?;
    if let Some(last) = res.history.last() {
        writeln!(out, "d_value: {}", last.d_value)?;
        writeln!(out, "residual_norm: {:e}", last.residual_norm)?;
    }
    Ok(())
}

fn cmd_reproduce(args: &ReproduceArgs, out: &mut dyn Write) -> Outcome {
    match args.example {
        Example::Tight => reproduce_tight(args, out),
        Example::Nonlinear => reproduce_nonlinear(args, out),
    }
}

/// Eight geometric points from 0.1 down to 1e-3.
pub fn default_eps_grid() -> Vec<f64> {
    (0..8).map(|k| 0.1 * 10f64.powf(-2.0 * k as f64 / 7.0)).collect()
}

fn reproduce_tight(args: &ReproduceArgs, out: &mut dyn Write) -> Outcome {
    if !(args.p > 1.0 && args.p <= 2.0) {
        return Err(invalid(format!(
            "the tight example needs p in (1, 2], got {}",
            args.p
        )));
    }
    let fit = fit_path_exponent(args.p, &default_eps_grid())?;
    let inst = tight_instance(args.p)?;
    let cfg = SolverConfig {
        max_sweeps: args.sweeps.unwrap_or(10_000),
        ..SolverConfig::default()
    };
    let reference = Reference {
        d_star: Some(-0.5),
        dual_solution: Some(DualPoint::new(vec![vec![1.0, 0.0]])),
    };
    let res = solve_with(&inst, &cfg, &reference).map_err(Failure::solver)?;
    if let Some(path) = &args.out {
        write_history_csv(&res.history, create(path)?, true)?;
    }
    writeln!(out, "p: {}", args.p)?;
    writeln!(out, "gap_exponent: {:.4}", fit.exponent)?;
    writeln!(out, "expected_exponent: {:.4}", fit.expected)?;
    writeln!(out, "dist_exponent: {:.4}", fit.dist_exponent)?;
    writeln!(out, "r_squared: {:.6}", fit.r_squared)?;
    writeln!(out, "termination: {}", res.termination)?;
    writeln!(out, "sweeps: {}", res.sweeps)?;
    writeln!(out, "x: {}", fmt_vec(&res.x))?;
    writeln!(out, "x_error: {:e}", crate::linalg::dist(&res.x, &[1.0, 0.0]))?;
    Ok(())
}

fn reproduce_nonlinear(args: &ReproduceArgs, out: &mut dyn Write) -> Outcome {
    let sweeps = args.sweeps.unwrap_or(100_000);
    if sweeps < 1050 {
        return Err(invalid(format!(
            "the nonlinear example needs at least 1050 sweeps for its fit, got {sweeps}"
        )));
    }
    let inst = nonlinear_instance();
    let cfg = SolverConfig {
        max_sweeps: sweeps,
        step_tol: 0.0,
        residual_tol: 0.0,
        record_every: 1,
        assert_descent: false,
    };
    let reference = Reference {
        d_star: Some(-1.5),
        dual_solution: Some(nonlinear_dual_solution()),
    };
    let mut recurrence = RecurrenceState::default();
    let mut deviation = 0.0f64;
    let res = solve_observed(&inst, &cfg, &reference, |_, y, _| {
        let step = recurrence.next().expect("recurrence is unbounded");
        deviation = deviation.max(y.dist_inf(&step.dual_point()));
    })
    .map_err(Failure::solver)?;
    if let Some(path) = &args.out {
        write_history_csv(&res.history, create(path)?, true)?;
    }
    let dist_sq: Vec<f64> = res
        .history
        .iter()
        .map(|r| r.dist_argmin.expect("reference solution set").powi(2))
        .collect();
    let fit = fit_power_law(&dist_sq, 999)?;
    writeln!(out, "sweeps: {}", res.sweeps)?;
    writeln!(out, "max_iterate_deviation: {deviation:e}")?;
    writeln!(out, "dist_sq_exponent: {:.4}", fit.parameter)?;
    writeln!(out, "expected_exponent: -1")?;
    writeln!(out, "r_squared: {:.6}", fit.r_squared)?;
    writeln!(out, "window: {}..={}", fit.window.0 + 1, fit.window.1 + 1)?;
    writeln!(out, "x: {}", fmt_vec(&res.x))?;
    Ok(())
}

fn series(h: &History, column: Column) -> Result<Vec<f64>> {
    let missing = || Error::InvalidArgument(format!("history has no complete {} column", column.name()));
    match column {
        Column::Gap => h.gaps().ok_or_else(missing),
        Column::Dist => h.dists().ok_or_else(missing),
        Column::DistSq => h.dists().map(|d| d.iter().map(|v| v * v).collect()).ok_or_else(missing),
        Column::Step => Ok(h.step_norm.clone()),
        Column::Residual => Ok(h.residual_norm.clone()),
    }
}

fn cmd_rates(args: &RatesArgs, out: &mut dyn Write) -> Outcome {
    let h = read_history_csv(BufReader::new(File::open(&args.history)?))?;
    let column = args
        .column
        .unwrap_or(if h.gaps().is_some() { Column::Gap } else { Column::Step });
    let values = series(&h, column)?;
    let report: RateReport = match args.mode {
        Mode::Linear => {
            let floor = match column {
                Column::Gap => h.implied_d_star().map_or(0.0, gap_noise_floor),
                _ => 0.0,
            };
            fit_linear_ratio_above(&values, floor)?
        }
        Mode::Power => {
            if h.sweep.iter().enumerate().any(|(i, &t)| t != i + 1) {
                return Err(invalid(
                    "power-law fits need every sweep recorded (--record-every 1)",
                ));
            }
            fit_power_law(&values, args.skip)?
        }
    };
    if let Some(path) = &args.out {
        write_rate_report_csv(&report, create(path)?)?;
    }
    writeln!(out, "mode: {}", report.mode)?;
    writeln!(out, "column: {}", column.name())?;
    writeln!(out, "parameter: {}", report.parameter)?;
    writeln!(out, "r_squared: {}", report.r_squared)?;
    writeln!(out, "fit_residual: {:e}", report.fit_residual)?;
    writeln!(
        out,
        "window: {}..={}",
        h.sweep[report.window.0], h.sweep[report.window.1]
    )?;
    writeln!(out, "convergent: {}", report.is_convergent())?;
    Ok(())
}

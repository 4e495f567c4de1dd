//! Command-line front end: `ksym {check|reduce|integrate|reconstruct|golden}`.
//!
//! Exit codes: 0 success, 1 a check failed, 2 numerical failure, 3 config error.

pub mod commands;
pub mod config;
pub mod csv;

pub use commands::{
    golden_closed_form, golden_config, run_check, run_golden, run_integrate, run_reconstruct, run_reduce, CliError, Outcome, GOLDEN_CONFIG,
};
pub use config::{load_config, parse_config, ConfigError, ProblemConfig, ReducedKind};

use crate::integrability::Verdict;
use crate::solver::grid::AxisSpec;
use crate::solver::march::SweepOrder;
use clap::{Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "ksym", version, about = "k-symplectic Lagrangian field theory with symmetry")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Problem file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Axis override `AX:MIN:MAX:COUNT`, AX counting from 1. Repeatable.
    #[arg(long = "grid", global = true, value_parser = parse_grid_flag)]
    pub grid: Vec<(usize, AxisSpec)>,
    /// Pass tolerance for verdicts; for `golden`, the closed-form bound.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the CSV here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Axis order of the grid march, `12` or `21`.
    #[arg(long = "sweep-order", global = true)]
    pub sweep_order: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Invariant report: brackets, Jacobi, invariance, regularity, integrability.
    Check,
    /// Reduced-field metadata and the LP residual self-test.
    Reduce,
    /// Reduced solution on the grid, as CSV.
    Integrate,
    /// Full field on the grid, as CSV, with the Euler-Lagrange residual.
    Reconstruct,
    /// Embedded harmonic-map problem against its closed form.
    Golden,
}

fn parse_grid_flag(s: &str) -> Result<(usize, AxisSpec), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || format!("`{s}` is not AX:MIN:MAX:COUNT");
    if parts.len() != 4 {
        return Err(bad());
    }
    let ax: usize = parts[0].trim_start_matches('t').parse().map_err(|_| bad())?;
    let min: f64 = parts[1].parse().map_err(|_| bad())?;
    let max: f64 = parts[2].parse().map_err(|_| bad())?;
    let count: usize = parts[3].parse().map_err(|_| bad())?;
    if ax == 0 {
        return Err("axes count from 1".into());
    }
    Ok((ax - 1, AxisSpec { min, max, count }))
}

/// Applies command-line overrides and `KSYM_SEED` to a loaded config.
pub fn apply_overrides(
    cfg: &mut ProblemConfig,
    grid: &[(usize, AxisSpec)],
    tol: Option<f64>,
    sweep_order: Option<&str>,
    seed: Option<&str>,
) -> Result<(), ConfigError> {
    let bad = |path: &str, message: String| ConfigError { path: path.into(), message };
    if !grid.is_empty() {
        let mut axes: Vec<Option<AxisSpec>> = match &cfg.axes {
            Some(a) => a.iter().copied().map(Some).collect(),
            None => vec![None; cfg.k],
        };
        for (ax, spec) in grid {
            if *ax >= cfg.k {
                return Err(bad("--grid", format!("axis {} out of range for k = {}", ax + 1, cfg.k)));
            }
            axes[*ax] = Some(*spec);
        }
        let axes: Option<Vec<AxisSpec>> = axes.into_iter().collect();
        let axes = axes.ok_or_else(|| bad("--grid", "every axis needs a range when the config has no grid".into()))?;
        config::check_axes(&axes, cfg.k, "--grid")?;
        cfg.axes = Some(axes);
    }
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(bad("--tol", "must be positive".into()));
        }
        cfg.tol.pass = t;
        cfg.tol.fail = cfg.tol.fail.max(t);
    }
    if let Some(s) = sweep_order {
        let o = SweepOrder::parse(s, cfg.k).ok_or_else(|| bad("--sweep-order", format!("`{s}` is not an axis permutation")))?;
        cfg.march.order = Some(o);
    }
    if let Some(s) = seed {
        cfg.sampling.seed = s.trim().parse().map_err(|_| bad("KSYM_SEED", format!("`{s}` is not an unsigned integer")))?;
    }
    Ok(())
}

fn execute(cli: &Cli, seed: Option<&str>) -> Result<Outcome, CliError> {
    let mut cfg = match (cli.command, &cli.config) {
        (Command::Golden, None) => golden_config()?,
        (_, Some(p)) => load_config(p)?,
        (_, None) => return Err(ConfigError { path: "--config".into(), message: "required for this subcommand".into() }.into()),
    };
    let golden = cli.command == Command::Golden;
    let tol = if golden { None } else { cli.tol };
    apply_overrides(&mut cfg, &cli.grid, tol, cli.sweep_order.as_deref(), seed)?;
    match cli.command {
        Command::Check => run_check(&cfg),
        Command::Reduce => run_reduce(&cfg),
        Command::Integrate => run_integrate(&cfg),
        Command::Reconstruct => run_reconstruct(&cfg),
        Command::Golden => run_golden(&cfg, cli.tol.unwrap_or(1e-6)),
    }
}

/// Parses `args`, runs the subcommand and returns the exit code.
pub fn run<'w, I, T>(args: I, seed: Option<&str>, out: &'w mut dyn Write, err: &'w mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = write!(if e.use_stderr() { err } else { out }, "{e}");
            return code;
        }
    };
    let outcome = match execute(&cli, seed) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "ksym: {e}");
            return e.exit_code();
        }
    };
    let mut report_to = out;
    if let Some(csv) = &outcome.csv {
        match &cli.output {
            Some(path) => {
                if let Err(e) = std::fs::write(path, csv) {
                    let _ = writeln!(err, "ksym: cannot write {}: {e}", path.display());
                    return 2;
                }
            }
            None if outcome.csv_to_stdout => {
                let _ = report_to.write_all(csv.as_bytes());
                report_to = err;
            }
            None => {}
        }
    }
    let _ = report_to.write_all(outcome.report.as_bytes());
    match outcome.verdict {
        Verdict::Fail => 1,
        _ => 0,
    }
}

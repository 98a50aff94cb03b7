//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a check or assertion fails, 2 on
//! malformed input.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analytics::{self, format_number, Table};
use crate::certificate;
use crate::domain::{validate_spec, ContestSpec, Equilibrium, TemporalStructure};
use crate::equilibrium::solve;
use crate::error::ContestError;
use crate::temporal::eval_temporal;
use crate::verification::{self, Check, VerificationReport};

/// Largest simultaneous-form residual accepted by `temporal`.
pub const TEMPORAL_TOLERANCE: f64 = 1e-12;

/// Default number of random allocation pairs for the log-concavity spot checks.
pub const DEFAULT_SAMPLES: usize = 100;

#[derive(Debug, Parser)]
#[command(name = "team-contest", version, about = "Two-team majoritarian contest solver and verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a contest in closed form.
    Solve {
        spec: PathBuf,
        /// Write the equilibrium JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a per-battle CSV table.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check the closed form against numerical best responses.
    Verify {
        spec: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Random allocation pairs for the log-concavity spot checks.
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the exact coefficient-block certificate for 2N+1 battles.
    Certify {
        #[arg(long)]
        n_level: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Majority probability under a cluster ordering.
    Temporal {
        spec: PathBuf,
        /// Clusters separated by ';', 1-based battle indices by ','.
        #[arg(long)]
        clusters: String,
    },
    /// Comparative-statics sweep.
    Sweep {
        spec: PathBuf,
        #[arg(long, value_enum)]
        kind: SweepKind,
        /// 1-based battle index; not used by the budget sweep.
        #[arg(long)]
        target: Option<usize>,
        /// Comma-separated grid values.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepKind {
    Cost,
    Budget,
    Salience,
    #[value(name = "effort-r")]
    EffortR,
}

/// Failure of a command: either bad input or a failed check.
#[derive(Debug)]
enum Failure {
    Input(String),
    Check(String),
}

impl From<ContestError> for Failure {
    fn from(err: ContestError) -> Self {
        match err {
            ContestError::NonConvergence { .. } | ContestError::BlockStructure { .. } => {
                Failure::Check(err.to_string())
            }
            _ => Failure::Input(err.to_string()),
        }
    }
}

type Outcome = std::result::Result<bool, Failure>;

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return 0;
            }
            let text = err.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("{line}");
            return 2;
        }
    };
    match dispatch(cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Solve { spec, out, csv } => cmd_solve(&spec, out.as_deref(), csv.as_deref()),
        Command::Verify {
            spec,
            tol,
            seed,
            samples,
            jobs,
        } => with_jobs(jobs, || cmd_verify(&spec, tol, seed, samples)),
        Command::Certify { n_level, jobs } => with_jobs(jobs, || cmd_certify(n_level)),
        Command::Temporal { spec, clusters } => cmd_temporal(&spec, &clusters),
        Command::Sweep {
            spec,
            kind,
            target,
            grid,
            out,
        } => cmd_sweep(&spec, kind, target, &grid, out.as_deref()),
    }
}

fn with_jobs(jobs: Option<usize>, f: impl FnOnce() -> Outcome + Send) -> Outcome {
    match jobs {
        None => f(),
        Some(0) => Err(Failure::Input("--jobs must be at least 1".to_string())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Input(e.to_string()))?;
            pool.install(f)
        }
    }
}

/// Reads and validates a spec file.
pub fn load_spec(path: &Path) -> Result<ContestSpec, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let spec: ContestSpec =
        serde_json::from_str(&text).map_err(|e| format!("malformed spec {}: {e}", path.display()))?;
    validate_spec(spec).map_err(|e| e.to_string())
}

fn spec_from(path: &Path) -> Result<ContestSpec, Failure> {
    load_spec(path).map_err(Failure::Input)
}

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

/// Per-battle equilibrium table.
pub fn equilibrium_csv(eq: &Equilibrium) -> String {
    let mut out = String::from(
        "t,c_t,p_star_a,pivotality,responsiveness,salience,v_star_a,v_star_b,effort_a,effort_b\n",
    );
    for t in 0..eq.n_battles() {
        let cells = [
            eq.cost_index[t],
            eq.prob_a[t],
            eq.pivotality[t],
            eq.responsiveness[t],
            eq.salience[t],
            eq.alloc_a.shares[t],
            eq.alloc_b.shares[t],
            eq.efforts_a[t],
            eq.efforts_b[t],
        ]
        .map(format_number);
        let _ = writeln!(out, "{},{}", t + 1, cells.join(","));
    }
    out
}

fn cmd_solve(spec: &Path, out: Option<&Path>, csv: Option<&Path>) -> Outcome {
    let eq = solve(&spec_from(spec)?)?;
    let json = to_json(&eq);
    match out {
        Some(path) => write_file(path, &json)?,
        None => println!("{json}"),
    }
    if let Some(path) = csv {
        write_file(path, &equilibrium_csv(&eq))?;
    }
    Ok(true)
}

#[derive(Serialize)]
struct VerifyOutput {
    equilibrium: VerificationReport,
    log_concavity: Vec<Check>,
    quasiconcavity_counterexample: verification::QuasiconcavityReport,
    pass: bool,
}

fn cmd_verify(spec: &Path, tol: f64, seed: u64, samples: usize) -> Outcome {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Failure::Input(format!("--tol must be positive, got {tol}")));
    }
    let spec = spec_from(spec)?;
    let equilibrium = verification::verify_equilibrium(&spec, tol)?;
    let log_concavity = verification::log_concavity_spot_checks(&spec, samples, seed)?;
    let pass = equilibrium.pass && log_concavity.iter().all(|c| c.pass);
    println!(
        "{}",
        to_json(&VerifyOutput {
            equilibrium,
            log_concavity,
            quasiconcavity_counterexample: verification::quasiconcavity_counterexample(),
            pass,
        })
    );
    Ok(pass)
}

fn cmd_certify(n_level: usize) -> Outcome {
    let report = certificate::certify(n_level)?;
    println!("{}", to_json(&report));
    if !report.pass {
        for failure in &report.failures {
            eprintln!("certificate failure: {failure}");
        }
    }
    Ok(report.pass)
}

#[derive(Serialize)]
struct TemporalOutput {
    probability: f64,
    simultaneous: f64,
    residual: f64,
}

fn cmd_temporal(spec: &Path, clusters: &str) -> Outcome {
    let spec = spec_from(spec)?;
    let structure = TemporalStructure::parse(clusters, spec.n_battles())?;
    let eq = solve(&spec)?;
    let probability = eval_temporal(&eq.prob_a, &structure)?;
    let residual = (probability - eq.team_prob_a).abs();
    println!(
        "{}",
        to_json(&TemporalOutput {
            probability,
            simultaneous: eq.team_prob_a,
            residual,
        })
    );
    Ok(residual <= TEMPORAL_TOLERANCE)
}

fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|item| {
            item.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Input(format!("'{}' is not a number", item.trim())))
        })
        .collect()
}

fn battle_index(target: Option<usize>, spec: &ContestSpec) -> Result<usize, Failure> {
    let t = target.ok_or_else(|| Failure::Input("--target is required for this sweep".to_string()))?;
    if t == 0 || t > spec.n_battles() {
        return Err(Failure::Input(format!(
            "--target {t} out of range 1..={}",
            spec.n_battles()
        )));
    }
    Ok(t - 1)
}

fn cmd_sweep(spec: &Path, kind: SweepKind, target: Option<usize>, grid: &str, out: Option<&Path>) -> Outcome {
    let spec = spec_from(spec)?;
    let grid = parse_grid(grid)?;
    let table: Table = match kind {
        SweepKind::Cost => analytics::sweep_cost_index(&spec, battle_index(target, &spec)?, &grid)?,
        SweepKind::Budget => analytics::sweep_budget_ratio(&spec, &grid)?,
        SweepKind::Salience => analytics::salience_profile(&spec, battle_index(target, &spec)?, &grid)?,
        SweepKind::EffortR => {
            analytics::effort_cost_r_monotonicity(&spec, battle_index(target, &spec)?, &grid)?
        }
    };
    let csv = table.to_csv();
    match out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    for check in &table.assertions {
        eprintln!(
            "{} {} (residual {}, threshold {})",
            if check.pass { "pass" } else { "FAIL" },
            check.name,
            check.residual,
            check.threshold
        );
    }
    Ok(table.pass())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_and_bad_flags() {
        assert_eq!(run(["team-contest", "--help"]), 0);
        assert_eq!(run(["team-contest", "certify"]), 2);
        assert_eq!(run(["team-contest", "solve", "x.json", "--bogus"]), 2);
        assert_eq!(run(["team-contest", "certify", "--n-level", "9"]), 2);
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0.5, 1,2").unwrap(), vec![0.5, 1.0, 2.0]);
        assert!(parse_grid("1,,2").is_err());
    }
}

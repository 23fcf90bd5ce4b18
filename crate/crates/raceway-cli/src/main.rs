//! Command-line front end for the raceway optimal-control toolkit.

// `!(v > 0)`-style guards must reject NaN, which `v <= 0` would admit.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod files;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::RunConfig;

/// Machine-parsable failure: one line `error: <kind>: <message>`.
#[derive(Debug)]
pub struct CliError {
    kind: &'static str,
    msg: String,
}

impl CliError {
    pub fn schema(msg: String) -> Self {
        Self {
            kind: "schema",
            msg,
        }
    }
    pub fn io(msg: String) -> Self {
        Self { kind: "io", msg }
    }
    pub fn compute(msg: String) -> Self {
        Self {
            kind: "compute",
            msg,
        }
    }
    pub fn usage(msg: String) -> Self {
        Self { kind: "usage", msg }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind, self.msg)
    }
}

impl From<raceway_core::Error> for CliError {
    fn from(e: raceway_core::Error) -> Self {
        CliError::compute(e.to_string())
    }
}

/// Inclusive `start:stop:count` axis specification.
#[derive(Debug, Clone, Copy)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl RangeSpec {
    pub fn values(&self) -> Vec<f64> {
        raceway_core::numeric::linspace(self.start, self.stop, self.count)
    }
}

impl std::str::FromStr for RangeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:count, got `{s}`"));
        }
        let start: f64 = parts[0].parse().map_err(|e| format!("start: {e}"))?;
        let stop: f64 = parts[1].parse().map_err(|e| format!("stop: {e}"))?;
        let count: usize = parts[2].parse().map_err(|e| format!("count: {e}"))?;
        if count < 2 {
            return Err("count must be at least 2".into());
        }
        if !(stop > start) {
            return Err("stop must exceed start".into());
        }
        Ok(RangeSpec { start, stop, count })
    }
}

#[derive(Parser)]
#[command(
    name = "raceway",
    about = "Periodic optimal control of light-forced photobioreactors",
    version
)]
struct Cli {
    /// JSON run configuration (defaults provide the Isochrysis galbana reactor).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for emitted CSV/report files.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// File-name prefix for emitted artifacts (defaults to the subcommand).
    #[arg(long, global = true)]
    prefix: Option<String>,
    /// Integration step override (applies to sweeps as well).
    #[arg(long, global = true)]
    step: Option<f64>,
    /// Override for the switch-costate verification tolerance.
    #[arg(long, global = true)]
    lambda_tol: Option<f64>,
    /// Override for the relative Hamiltonian-drift tolerance.
    #[arg(long, global = true)]
    drift_tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the constant-light optimum and feasibility gates.
    Steady,
    /// Solve the periodic control problem over all admissible structures.
    Solve,
    /// Optimize a constant dilution rate.
    Constant,
    /// Integrate a user-supplied piecewise policy.
    Simulate {
        /// JSON policy file: an array of {start, end, mode[, u]} segments.
        #[arg(long)]
        policy: PathBuf,
        /// Initial biomass; defaults to the policy's periodic state.
        #[arg(long)]
        x0: Option<f64>,
    },
    /// Compare dusk-centred harvest windows against flow-matched constants.
    NearOptimal {
        /// Flow budgets to sweep, `start:stop:count`; auto-bracketed by
        /// wash-out detection when omitted.
        #[arg(long)]
        flows: Option<RangeSpec>,
    },
    /// Classify the optimal-solution family over an (r, u_max) grid.
    Bifurcation {
        #[arg(long)]
        r: Option<RangeSpec>,
        #[arg(long)]
        ubar: Option<RangeSpec>,
    },
    /// Bang-bang productivity levels over a switch-time grid.
    Contour {
        #[arg(long)]
        t1: Option<RangeSpec>,
        #[arg(long)]
        t2: Option<RangeSpec>,
    },
    /// Seasonal fishing-stock scenario report.
    Fishing,
    /// Re-verify the maximum-principle conditions on a saved solution.
    Verify {
        /// Solution JSON produced by `solve`.
        #[arg(long)]
        solution: PathBuf,
    },
}

fn init_threads() {
    if let Ok(n) = std::env::var("RACEWAY_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    init_threads();

    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(step) = cli.step {
        if !(step > 0.0) {
            return Err(CliError::usage(format!(
                "--step must be positive, got {step}"
            )));
        }
        cfg.solver.step = step;
        cfg.solver.sweep_step = step;
    }
    if let Some(tol) = cli.lambda_tol {
        cfg.solver.switch_lambda_tol = tol;
    }
    if let Some(tol) = cli.drift_tol {
        cfg.solver.hamiltonian_drift_tol = tol;
    }
    cfg.validate()?;

    let dir = cli
        .output_dir
        .unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    let default_prefix = match &cli.command {
        Command::Steady => "steady",
        Command::Solve => "solve",
        Command::Constant => "constant",
        Command::Simulate { .. } => "simulate",
        Command::NearOptimal { .. } => "near_optimal",
        Command::Bifurcation { .. } => "bifurcation",
        Command::Contour { .. } => "contour",
        Command::Fishing => "fishing",
        Command::Verify { .. } => "verify",
    };
    let prefix = cli
        .prefix
        .or_else(|| cfg.output.prefix.clone())
        .unwrap_or_else(|| default_prefix.to_string());
    let out = commands::Emitter::new(dir, prefix);

    match cli.command {
        Command::Steady => commands::steady(&cfg),
        Command::Solve => commands::solve(&cfg, &out),
        Command::Constant => commands::constant(&cfg, &out),
        Command::Simulate { policy, x0 } => commands::simulate(&cfg, &out, &policy, x0),
        Command::NearOptimal { flows } => commands::near_optimal(&cfg, &out, flows),
        Command::Bifurcation { r, ubar } => commands::bifurcation(&cfg, &out, r, ubar),
        Command::Contour { t1, t2 } => commands::contour(&cfg, &out, t1, t2),
        Command::Fishing => commands::fishing(&cfg, &out),
        Command::Verify { solution } => commands::verify(&cfg, &out, &solution),
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

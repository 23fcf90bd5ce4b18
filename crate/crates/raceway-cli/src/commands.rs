//! Subcommand implementations: compute, emit files, print summaries.

use std::path::{Path, PathBuf};

use raceway_core::export::{
    bifurcation_csv, bifurcation_matrix_csv, bifurcation_overlays_csv, contour_csv,
    contour_matrix_csv, flow_sweep_csv, fmt_sig, pmp_csv, solution_summary, trajectory_csv,
};
use raceway_core::{
    analysis, best_constant, evaluate_structure, integrate, periodic_state, pmp, solve_with,
    ControlPolicy,
};

use crate::config::RunConfig;
use crate::files::{read_policy, SolutionFile, StructureFile};
use crate::{CliError, RangeSpec};

/// Writes artifacts under `dir` with a common file-name prefix.
pub struct Emitter {
    dir: PathBuf,
    prefix: String,
}

impl Emitter {
    pub fn new(dir: PathBuf, prefix: String) -> Self {
        Self { dir, prefix }
    }

    pub fn write(&self, suffix: &str, contents: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.dir)
            .map_err(|e| CliError::io(format!("{}: {e}", self.dir.display())))?;
        let path = self.dir.join(format!("{}_{suffix}", self.prefix));
        std::fs::write(&path, contents)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        println!("wrote {}", path.display());
        Ok(path)
    }
}

pub fn steady(cfg: &RunConfig) -> Result<(), CliError> {
    let params = cfg.reactor_params()?;
    match params.x_sigma() {
        Ok(xs) => {
            println!("x_sigma: {}", fmt_sig(xs));
            println!("u_sigma: {}", fmt_sig(params.u_sigma()?));
        }
        Err(e) => println!("x_sigma: none ({e})"),
    }
    println!("x_bar0: {}", fmt_sig(params.closed_equilibrium()));
    let rep = params.feasibility();
    println!(
        "growth_assumption: {} (margin {})",
        rep.growth_assumption,
        fmt_sig(rep.growth_margin)
    );
    println!(
        "constant_max_possible: {} (margin {})",
        rep.constant_max_possible,
        fmt_sig(rep.constant_max_margin)
    );
    match rep.singular_margin {
        Some(m) => println!(
            "singular_possible: {} (margin {})",
            rep.singular_possible,
            fmt_sig(m)
        ),
        None => println!("singular_possible: false (no interior optimum)"),
    }
    println!(
        "dilution_dominates: {} (margin {})",
        rep.large_bound,
        fmt_sig(rep.large_bound_margin)
    );
    Ok(())
}

pub fn solve(cfg: &RunConfig, out: &Emitter) -> Result<(), CliError> {
    let params = cfg.reactor_params()?;
    let sol = solve_with(&params, &cfg.solver_options())?;
    let summary = solution_summary(&sol, &params);
    print!("{summary}");
    out.write("summary.txt", &summary)?;
    out.write("trajectory.csv", &trajectory_csv(&sol.trajectory))?;
    out.write("pmp.csv", &pmp_csv(&sol.pmp))?;
    let file = SolutionFile {
        config: cfg.clone(),
        structure: StructureFile::from(sol.structure),
        x0: sol.x0,
        total_yield: sol.total_yield,
        total_flow: sol.total_flow,
    };
    out.write("solution.json", &file.to_json())?;
    Ok(())
}

pub fn constant(cfg: &RunConfig, out: &Emitter) -> Result<(), CliError> {
    let params = cfg.reactor_params()?;
    let bc = best_constant(&params, &cfg.solver_options());
    let mut text = String::new();
    text.push_str(&format!("u_hat: {}\n", fmt_sig(bc.dilution)));
    text.push_str(&format!("x0: {}\n", fmt_sig(bc.x0)));
    text.push_str(&format!("yield: {}\n", fmt_sig(bc.total_yield)));
    text.push_str(&format!("cumulated_flow: {}\n", fmt_sig(bc.total_flow)));
    print!("{text}");
    out.write("summary.txt", &text)?;
    if bc.total_yield > 0.0 {
        let policy = ControlPolicy::constant(bc.dilution, &params)?;
        let traj = integrate(&params, bc.x0, &policy, cfg.solver.step)?;
        out.write("trajectory.csv", &trajectory_csv(&traj))?;
    }
    Ok(())
}

pub fn simulate(
    cfg: &RunConfig,
    out: &Emitter,
    policy_path: &Path,
    x0: Option<f64>,
) -> Result<(), CliError> {
    let params = cfg.reactor_params()?;
    let policy = read_policy(policy_path, &params)?;
    let x0 = match x0 {
        Some(v) => v,
        None => periodic_state(&params, &policy, cfg.solver.step)?,
    };
    let traj = integrate(&params, x0, &policy, cfg.solver.step)?;
    println!("x0: {}", fmt_sig(x0));
    println!("x_final: {}", fmt_sig(traj.terminal_state()));
    println!("yield: {}", fmt_sig(traj.total_yield));
    println!("cumulated_flow: {}", fmt_sig(traj.total_flow));
    out.write("trajectory.csv", &trajectory_csv(&traj))?;
    Ok(())
}

pub fn near_optimal(
    cfg: &RunConfig,
    out: &Emitter,
    flows: Option<RangeSpec>,
) -> Result<(), CliError> {
    let params = cfg.reactor_params()?;
    let opts = cfg.sweep_options();
    let values = match flows {
        Some(spec) => spec.values(),
        None => {
            // bracket the axis by wash-out detection
            let cap = analysis::washout_flow(&params, &opts);
            raceway_core::numeric::linspace(0.0, cap, 41)
        }
    };
    let rows = analysis::flow_sweep(&params, &values, &opts)?;
    let csv = flow_sweep_csv(&rows);
    out.write("grid.csv", &csv)?;
    let best = rows
        .iter()
        .max_by(|a, b| a.window_yield.partial_cmp(&b.window_yield).unwrap());
    if let Some(row) = best {
        println!(
            "best window: flow {} yield {}",
            fmt_sig(row.flow),
            fmt_sig(row.window_yield)
        );
    }
    Ok(())
}

pub fn bifurcation(
    cfg: &RunConfig,
    out: &Emitter,
    r: Option<RangeSpec>,
    ubar: Option<RangeSpec>,
) -> Result<(), CliError> {
    let params = cfg.reactor_params()?;
    let n = cfg.solver.bifurcation_resolution;
    let r = r.unwrap_or(RangeSpec {
        start: 0.01,
        stop: 1.0,
        count: n,
    });
    let ubar = ubar.unwrap_or(RangeSpec {
        start: 0.01,
        stop: 2.5,
        count: n,
    });
    let grid =
        analysis::bifurcation_grid(&params, &r.values(), &ubar.values(), &cfg.sweep_options());
    out.write("grid.csv", &bifurcation_csv(&grid))?;
    out.write("grid_matrix.csv", &bifurcation_matrix_csv(&grid))?;
    out.write("overlays.csv", &bifurcation_overlays_csv(&grid))?;
    let mut counts = std::collections::BTreeMap::new();
    for label in &grid.labels {
        *counts.entry(label.as_str()).or_insert(0usize) += 1;
    }
    for (label, count) in counts {
        println!("{label}: {count} cells");
    }
    Ok(())
}

pub fn contour(
    cfg: &RunConfig,
    out: &Emitter,
    t1: Option<RangeSpec>,
    t2: Option<RangeSpec>,
) -> Result<(), CliError> {
    let params = cfg.reactor_params()?;
    let n = cfg.solver.contour_resolution;
    let td = params.day_length;
    let t1 = t1.unwrap_or(RangeSpec {
        start: 0.05 * td,
        stop: 0.95 * td,
        count: n,
    });
    let t2 = t2.unwrap_or(RangeSpec {
        start: td + 0.05 * (params.period - td),
        stop: params.period - 0.05 * (params.period - td),
        count: n,
    });
    if !(t1.start > 0.0 && t1.stop <= td) {
        return Err(CliError::usage(format!(
            "--t1 must lie inside (0, {td}], got {}:{}",
            t1.start, t1.stop
        )));
    }
    if !(t2.start >= td && t2.stop < params.period) {
        return Err(CliError::usage(format!(
            "--t2 must lie inside [{td}, {}), got {}:{}",
            params.period, t2.start, t2.stop
        )));
    }
    let grid = analysis::productivity_contour(
        &params,
        (t1.start, t1.stop),
        (t2.start, t2.stop),
        (t1.count, t2.count),
        cfg.solver.sweep_step,
    );
    out.write("grid.csv", &contour_csv(&grid))?;
    out.write("grid_matrix.csv", &contour_matrix_csv(&grid))?;
    let (i, j) = grid.argmax();
    println!(
        "max cell: t_open {} t_close {} yield {}",
        fmt_sig(grid.t_open_values[i]),
        fmt_sig(grid.t_close_values[j]),
        fmt_sig(grid.yield_at(i, j))
    );
    Ok(())
}

pub fn fishing(cfg: &RunConfig, out: &Emitter) -> Result<(), CliError> {
    // an explicit logistic configuration overrides the published scenario
    let params = match cfg.model {
        crate::config::ModelConfig::Logistic { .. } => cfg.reactor_params()?,
        _ => raceway_core::ReactorParams::fishing_stock(),
    };
    let report = analysis::fishing_scenario_with(&params, &cfg.solver_options())?;

    let mut text = String::new();
    text.push_str(&solution_summary(&report.optimal, &report.params));
    text.push_str(&format!(
        "best_constant_u: {}\n",
        fmt_sig(report.best_constant.dilution)
    ));
    text.push_str(&format!(
        "best_constant_yield: {}\n",
        fmt_sig(report.best_constant.total_yield)
    ));
    text.push_str(&format!("improvement: {}\n", fmt_sig(report.improvement)));
    let unfished_peak = report
        .unfished
        .samples
        .iter()
        .map(|s| s.x)
        .fold(0.0, f64::max);
    text.push_str(&format!("unfished_x0: {}\n", fmt_sig(report.unfished.x0)));
    text.push_str(&format!("unfished_peak: {}\n", fmt_sig(unfished_peak)));
    print!("{text}");
    out.write("summary.txt", &text)?;
    out.write(
        "trajectory.csv",
        &trajectory_csv(&report.optimal.trajectory),
    )?;
    out.write("unfished_trajectory.csv", &trajectory_csv(&report.unfished))?;
    out.write("constant_trajectory.csv", &trajectory_csv(&report.constant))?;
    out.write("pmp.csv", &pmp_csv(&report.optimal.pmp))?;
    Ok(())
}

pub fn verify(cfg: &RunConfig, out: &Emitter, solution_path: &Path) -> Result<(), CliError> {
    let file = SolutionFile::read(solution_path)?;
    // tolerance overrides from the invocation apply on top of the snapshot
    let mut run_cfg = file.config.clone();
    run_cfg.solver.switch_lambda_tol = cfg.solver.switch_lambda_tol;
    run_cfg.solver.hamiltonian_drift_tol = cfg.solver.hamiltonian_drift_tol;
    run_cfg.validate()?;
    let params = run_cfg.reactor_params()?;
    let eval = evaluate_structure(&params, file.structure.into(), run_cfg.solver.step)?;
    if (eval.x0 - file.x0).abs() > 1e-6 * file.x0.abs().max(1.0) {
        println!(
            "note: recomputed x0 {} differs from stored {}",
            fmt_sig(eval.x0),
            fmt_sig(file.x0)
        );
    }
    let report = pmp::verify_with(&params, &eval.trajectory, run_cfg.pmp_tolerances());
    print!("{report}");
    out.write("pmp.csv", &pmp_csv(&report))?;
    Ok(())
}

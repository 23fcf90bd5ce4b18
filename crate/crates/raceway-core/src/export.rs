//! Plain-text and CSV serialization of results.
//!
//! All floating-point output carries 12 significant digits so regression
//! diffs stay meaningful; everything here is deterministic string
//! building, directly consumable by any plotting tool.

use crate::analysis::{BifurcationGrid, ContourGrid, FlowComparison};
use crate::dynamics::{ReactorParams, Trajectory};
use crate::pmp::PmpReport;
use crate::solver::{CandidateStructure, OptimalSolution};

/// 12-significant-digit scientific notation.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    format!("{v:.11e}")
}

/// Sampled path as CSV with columns `t,x,u,h,cumulative_yield`.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(traj.samples.len() * 64);
    out.push_str("t,x,u,h,cumulative_yield\n");
    for s in &traj.samples {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_sig(s.t),
            fmt_sig(s.x),
            fmt_sig(s.u),
            s.light as u8,
            fmt_sig(s.cumulative_yield)
        ));
    }
    out
}

pub fn pmp_csv_header() -> &'static str {
    "verdict,lambda0,lambda_period_gap,max_switch_lambda_error,hamiltonian_drift_day,\
     hamiltonian_drift_night,no_dark_opening,switch_levels_ok,singular_arc_ok,kelley_ok,\
     bang_ordering_ok,violations\n"
}

/// One CSV row per report; batch sweeps concatenate rows under one header.
pub fn pmp_csv_row(report: &PmpReport) -> String {
    let opt = |v: Option<bool>| v.map(|b| b.to_string()).unwrap_or_default();
    let max_switch_err = report
        .switch_lambda_errors
        .iter()
        .map(|c| c.error)
        .fold(0.0, f64::max);
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}\n",
        if report.pass() { "pass" } else { "fail" },
        fmt_sig(report.lambda0),
        fmt_sig(report.lambda_period_gap),
        fmt_sig(max_switch_err),
        fmt_sig(report.hamiltonian_drift_day),
        fmt_sig(report.hamiltonian_drift_night),
        report.no_dark_opening,
        report.switch_levels_ok,
        opt(report.singular_arc_ok),
        opt(report.kelley_ok),
        opt(report.bang_ordering_ok),
        report.violations.join(";")
    )
}

pub fn pmp_csv(report: &PmpReport) -> String {
    format!("{}{}", pmp_csv_header(), pmp_csv_row(report))
}

/// Human-readable solution summary block.
pub fn solution_summary(sol: &OptimalSolution, params: &ReactorParams) -> String {
    let mut out = String::new();
    out.push_str(&format!("family: {}\n", sol.family));
    match sol.structure {
        CandidateStructure::BangBang { t_open, t_close } => {
            out.push_str(&format!("t_open: {}\n", fmt_sig(t_open)));
            out.push_str(&format!("t_close: {}\n", fmt_sig(t_close)));
        }
        CandidateStructure::BangSingularBang { t_exit, t_close } => {
            let t_entry = sol.policy.segments()[1].start;
            out.push_str(&format!("t_entry: {}\n", fmt_sig(t_entry)));
            out.push_str(&format!("t_exit: {}\n", fmt_sig(t_exit)));
            out.push_str(&format!("t_close: {}\n", fmt_sig(t_close)));
        }
        CandidateStructure::ConstantMax => {
            out.push_str(&format!("dilution: {}\n", fmt_sig(params.dilution_max)));
        }
    }
    out.push_str(&format!("x0: {}\n", fmt_sig(sol.x0)));
    out.push_str(&format!("yield: {}\n", fmt_sig(sol.total_yield)));
    out.push_str(&format!("cumulated_flow: {}\n", fmt_sig(sol.total_flow)));
    out.push_str(&format!(
        "pmp_verdict: {}\n",
        if sol.pmp.pass() { "pass" } else { "fail" }
    ));
    for c in &sol.candidates {
        out.push_str(&format!(
            "candidate: family={} yield={} flow={} pmp={}\n",
            c.structure.family(),
            fmt_sig(c.total_yield),
            fmt_sig(c.total_flow),
            if c.pmp_pass { "pass" } else { "fail" }
        ));
    }
    out
}

/// Long-form bifurcation CSV: `row,col,r,u_bar,label`.
pub fn bifurcation_csv(grid: &BifurcationGrid) -> String {
    let mut out = String::from("row,col,r,u_bar,label\n");
    for (i, &r) in grid.r_values.iter().enumerate() {
        for (j, &u) in grid.u_bar_values.iter().enumerate() {
            out.push_str(&format!(
                "{i},{j},{},{},{}\n",
                fmt_sig(r),
                fmt_sig(u),
                grid.label(i, j)
            ));
        }
    }
    out
}

/// Compact label matrix: one row per `r`, columns ordered by `u_bar`.
pub fn bifurcation_matrix_csv(grid: &BifurcationGrid) -> String {
    let mut out = String::from("r\\u_bar");
    for &u in &grid.u_bar_values {
        out.push(',');
        out.push_str(&fmt_sig(u));
    }
    out.push('\n');
    for (i, &r) in grid.r_values.iter().enumerate() {
        out.push_str(&fmt_sig(r));
        for j in 0..grid.u_bar_values.len() {
            out.push(',');
            out.push_str(grid.label(i, j).as_str());
        }
        out.push('\n');
    }
    out
}

/// Overlay boundary curves on the respiration axis.
pub fn bifurcation_overlays_csv(grid: &BifurcationGrid) -> String {
    let mut out = String::from("r,u_sigma,u_dominance,r_no_solution\n");
    let singular: std::collections::BTreeMap<u64, f64> = grid
        .singular_boundary
        .iter()
        .map(|&(r, u)| (r.to_bits(), u))
        .collect();
    for &(r, u_dom) in &grid.dominance_boundary {
        let us = singular
            .get(&r.to_bits())
            .map(|u| fmt_sig(*u))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_sig(r),
            us,
            fmt_sig(u_dom),
            fmt_sig(grid.r_no_solution)
        ));
    }
    out
}

/// Long-form contour CSV: `row,col,t_open,t_close,yield`.
pub fn contour_csv(grid: &ContourGrid) -> String {
    let mut out = String::from("row,col,t_open,t_close,yield\n");
    for (i, &t1) in grid.t_open_values.iter().enumerate() {
        for (j, &t2) in grid.t_close_values.iter().enumerate() {
            out.push_str(&format!(
                "{i},{j},{},{},{}\n",
                fmt_sig(t1),
                fmt_sig(t2),
                fmt_sig(grid.yield_at(i, j))
            ));
        }
    }
    out
}

/// Compact yield matrix: one row per opening time, columns by closing time.
pub fn contour_matrix_csv(grid: &ContourGrid) -> String {
    let mut out = String::from("t_open\\t_close");
    for &t2 in &grid.t_close_values {
        out.push(',');
        out.push_str(&fmt_sig(t2));
    }
    out.push('\n');
    for (i, &t1) in grid.t_open_values.iter().enumerate() {
        out.push_str(&fmt_sig(t1));
        for j in 0..grid.t_close_values.len() {
            out.push(',');
            out.push_str(&fmt_sig(grid.yield_at(i, j)));
        }
        out.push('\n');
    }
    out
}

/// Flow-matched comparison CSV: `flow,window_yield,constant_yield`.
pub fn flow_sweep_csv(rows: &[FlowComparison]) -> String {
    let mut out = String::from("flow,window_yield,constant_yield\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_sig(row.flow),
            fmt_sig(row.window_yield),
            fmt_sig(row.constant_yield)
        ));
    }
    out
}

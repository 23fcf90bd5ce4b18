//! Periodic-yield maximization over the three admissible control
//! structures: bang-bang, bang-singular-bang, and permanent maximal
//! dilution.
//!
//! Switch times parameterize each family; the periodic initial state is
//! resolved per candidate (a guarded-Newton fixed point of the one-period
//! map for bang structures, direct tail propagation for singular ones,
//! whose orbit is pinned to `x_sigma` on the arc). The outer search is
//! derivative-free: a coarse grid seeds multi-start compass searches
//! refined by Nelder-Mead. Every family winner is checked against the
//! maximum-principle necessary conditions before selection.

use rayon::prelude::*;

use crate::dynamics::{
    integrate, integrate_terminal, periodic_state, propagate_pieces, rk4_day_step, ControlPolicy,
    Mode, Piece, ReactorParams, Trajectory,
};
use crate::error::{Error, Result};
use crate::numeric::{bisect, golden_max};
use crate::pmp::{verify_with, PmpReport, PmpTolerances};

/// A member of one of the admissible solution families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CandidateStructure {
    /// Closed growth, then maximal harvest on `[t_open, t_close)`, then
    /// closed. Opens strictly before dusk, closes strictly after.
    BangBang { t_open: f64, t_close: f64 },
    /// Closed growth to the singular level, hold until `t_exit`, maximal
    /// harvest until `t_close`, then closed. The arc entry time follows
    /// from the dynamics and is not a free parameter.
    BangSingularBang { t_exit: f64, t_close: f64 },
    /// Permanent maximal dilution.
    ConstantMax,
}

/// Which family a solved problem falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyLabel {
    BangBang,
    BangSingularBang,
    ConstantMax,
    NoSolution,
}

impl FamilyLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyLabel::BangBang => "bang-bang",
            FamilyLabel::BangSingularBang => "bang-singular-bang",
            FamilyLabel::ConstantMax => "constant-max",
            FamilyLabel::NoSolution => "no-solution",
        }
    }
}

impl std::fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl CandidateStructure {
    pub fn family(&self) -> FamilyLabel {
        match self {
            CandidateStructure::BangBang { .. } => FamilyLabel::BangBang,
            CandidateStructure::BangSingularBang { .. } => FamilyLabel::BangSingularBang,
            CandidateStructure::ConstantMax => FamilyLabel::ConstantMax,
        }
    }
}

/// Search budget and integration step for the outer optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// RK4 step (day).
    pub step: f64,
    /// Seeding grid resolution per switch-time axis.
    pub grid_per_axis: usize,
    /// Number of grid seeds carried into compass searches.
    pub starts: usize,
    /// Compass search stops when its probe step falls below this.
    pub pattern_min_step: f64,
    /// Nelder-Mead stops when the simplex diameter falls below this.
    pub simplex_tol: f64,
    pub nm_max_iter: usize,
    pub pmp_tolerances: PmpTolerances,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            step: 1e-4,
            grid_per_axis: 8,
            starts: 4,
            pattern_min_step: 1e-5,
            simplex_tol: 1e-6,
            nm_max_iter: 200,
            pmp_tolerances: PmpTolerances::default(),
        }
    }
}

impl SolverOptions {
    /// Reduced budget for parameter sweeps: coarser step and seeding grid.
    pub fn sweep() -> Self {
        Self {
            step: 1e-3,
            grid_per_axis: 4,
            starts: 4,
            pattern_min_step: 1e-4,
            simplex_tol: 1e-5,
            nm_max_iter: 80,
            ..Self::default()
        }
    }
}

/// Periodic orbit of one candidate structure.
#[derive(Debug, Clone)]
pub struct StructureEval {
    pub structure: CandidateStructure,
    pub x0: f64,
    pub trajectory: Trajectory,
}

impl StructureEval {
    pub fn total_yield(&self) -> f64 {
        self.trajectory.total_yield
    }

    pub fn total_flow(&self) -> f64 {
        self.trajectory.total_flow
    }
}

/// One family finalist, kept for reporting alongside the returned optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateSummary {
    pub structure: CandidateStructure,
    pub total_yield: f64,
    pub total_flow: f64,
    pub pmp_pass: bool,
}

/// The selected optimum with its verification report.
#[derive(Debug, Clone)]
pub struct OptimalSolution {
    pub structure: CandidateStructure,
    pub family: FamilyLabel,
    pub policy: ControlPolicy,
    pub x0: f64,
    pub trajectory: Trajectory,
    pub total_yield: f64,
    pub total_flow: f64,
    pub pmp: PmpReport,
    /// Every family finalist that admitted a periodic orbit.
    pub candidates: Vec<CandidateSummary>,
}

/// Build the periodic orbit implied by a structure, or report it infeasible.
pub fn evaluate_structure(
    params: &ReactorParams,
    structure: CandidateStructure,
    step: f64,
) -> Result<StructureEval> {
    match structure {
        CandidateStructure::ConstantMax => {
            let policy = ControlPolicy::all_max(params);
            let x0 = periodic_state(params, &policy, step).map_err(|_| {
                Error::Infeasible("no periodic orbit under permanent maximal dilution".into())
            })?;
            let trajectory = integrate(params, x0, &policy, step)?;
            Ok(StructureEval {
                structure,
                x0,
                trajectory,
            })
        }
        CandidateStructure::BangBang { t_open, t_close } => {
            let td = params.day_length;
            if !(t_open > 0.0 && t_open < td && t_close > td && t_close < params.period) {
                return Err(Error::Infeasible(format!(
                    "bang-bang switches ({t_open}, {t_close}) outside (0, {td}) x ({td}, {})",
                    params.period
                )));
            }
            let policy = ControlPolicy::bang_bang(t_open, t_close, params)?;
            let x0 = periodic_state(params, &policy, step)
                .map_err(|_| Error::Infeasible("bang-bang window washes the reactor out".into()))?;
            let trajectory = integrate(params, x0, &policy, step)?;
            Ok(StructureEval {
                structure,
                x0,
                trajectory,
            })
        }
        CandidateStructure::BangSingularBang { t_exit, t_close } => {
            let (x0, t_entry, _, _) = singular_orbit(params, t_exit, t_close, step)?;
            let policy = ControlPolicy::bang_singular_bang(t_entry, t_exit, t_close, params)?;
            let trajectory = integrate(params, x0, &policy, step)?;
            Ok(StructureEval {
                structure,
                x0,
                trajectory,
            })
        }
    }
}

/// Resolve the singular-family orbit for exit/close times.
///
/// Past the arc the path no longer depends on `x0`, so the periodic initial
/// state is the tail value `x(T)` propagated from `(t_exit, x_sigma)`; the
/// arc entry time is then located by event detection on the closed growth
/// from that state. Returns `(x0, t_entry, yield, flow)`.
fn singular_orbit(
    params: &ReactorParams,
    t_exit: f64,
    t_close: f64,
    step: f64,
) -> Result<(f64, f64, f64, f64)> {
    let td = params.day_length;
    let us = params.u_sigma().map_err(|_| {
        Error::Infeasible("no interior productivity optimum for a singular arc".into())
    })?;
    if us >= params.dilution_max {
        return Err(Error::Infeasible(format!(
            "singular dilution {us} not admissible under the bound {}",
            params.dilution_max
        )));
    }
    if !(t_exit > 0.0 && t_exit < td && t_close > td && t_close < params.period) {
        return Err(Error::Infeasible(format!(
            "singular-family switches ({t_exit}, {t_close}) outside (0, {td}) x ({td}, {})",
            params.period
        )));
    }
    let xs = params.x_sigma()?;

    // tail: maximal harvest from the arc, then closed, on the same grid
    // the full policy integration will use
    let tail = [
        Piece {
            start: t_exit,
            end: td,
            mode: Mode::Max,
            light: true,
        },
        Piece {
            start: td,
            end: t_close,
            mode: Mode::Max,
            light: false,
        },
        Piece {
            start: t_close,
            end: params.period,
            mode: Mode::Closed,
            light: false,
        },
    ];
    let end = propagate_pieces(params, xs, &tail, step, None)?;
    let x0 = end.x;
    if x0 >= xs * (1.0 - 1e-12) {
        return Err(Error::Infeasible(
            "periodic state would not lie below the singular level".into(),
        ));
    }

    // entry: first crossing of x_sigma under closed growth from x0
    let mut t = 0.0;
    let mut x = x0;
    let mut t_entry = None;
    while t < t_exit - 1e-15 {
        let h = step.min(t_exit - t);
        let (x_next, _) = rk4_day_step(&params.model, params.respiration, x, h);
        if x_next >= xs {
            let tau = bisect(
                |tau| rk4_day_step(&params.model, params.respiration, x, tau).0 - xs,
                0.0,
                h,
            );
            t_entry = Some(t + tau);
            break;
        }
        x = x_next;
        t += h;
    }
    let t_entry = t_entry.ok_or_else(|| {
        Error::Infeasible("closed growth does not reach the singular level before t_exit".into())
    })?;
    if t_entry >= t_exit - 1e-12 {
        return Err(Error::Infeasible(
            "singular arc would have zero length".into(),
        ));
    }

    let total_yield = us * xs * (t_exit - t_entry) + end.total_yield;
    let total_flow = us * (t_exit - t_entry) + end.total_flow;
    Ok((x0, t_entry, total_yield, total_flow))
}

/// Yield of a bang-bang window, `None` when the orbit washes out.
fn bang_bang_yield(params: &ReactorParams, t_open: f64, t_close: f64, step: f64) -> Option<f64> {
    let td = params.day_length;
    if !(t_open > 0.0 && t_open < td && t_close > td && t_close < params.period) {
        return None;
    }
    let policy = ControlPolicy::bang_bang(t_open, t_close, params).ok()?;
    let x0 = periodic_state(params, &policy, step).ok()?;
    Some(
        integrate_terminal(params, x0, &policy, step)
            .ok()?
            .total_yield,
    )
}

/// Yield of a singular-family candidate, `None` when infeasible.
fn singular_yield(params: &ReactorParams, t_exit: f64, t_close: f64, step: f64) -> Option<f64> {
    singular_orbit(params, t_exit, t_close, step)
        .ok()
        .map(|(_, _, y, _)| y)
}

#[derive(Clone, Copy)]
struct Bounds {
    lo: (f64, f64),
    hi: (f64, f64),
}

impl Bounds {
    fn clamp(&self, p: (f64, f64)) -> (f64, f64) {
        (
            p.0.clamp(self.lo.0, self.hi.0),
            p.1.clamp(self.lo.1, self.hi.1),
        )
    }
}

/// Compass pattern search with shrinking steps.
fn compass<F: Fn(f64, f64) -> Option<f64>>(
    f: &F,
    start: (f64, f64),
    mut step: (f64, f64),
    bounds: Bounds,
    min_step: f64,
) -> ((f64, f64), f64) {
    let mut best = start;
    let mut best_val = f(start.0, start.1).unwrap_or(f64::NEG_INFINITY);
    while step.0.max(step.1) > min_step {
        let probes = [
            (best.0 + step.0, best.1),
            (best.0 - step.0, best.1),
            (best.0, best.1 + step.1),
            (best.0, best.1 - step.1),
        ];
        let mut improved = false;
        for p in probes {
            let p = bounds.clamp(p);
            if let Some(v) = f(p.0, p.1) {
                if v > best_val {
                    best = p;
                    best_val = v;
                    improved = true;
                }
            }
        }
        if !improved {
            step = (0.5 * step.0, 0.5 * step.1);
        }
    }
    (best, best_val)
}

/// Nelder-Mead maximization in two dimensions with projected bounds.
fn nelder_mead<F: Fn(f64, f64) -> Option<f64>>(
    f: &F,
    start: (f64, f64),
    scale: f64,
    bounds: Bounds,
    simplex_tol: f64,
    max_iter: usize,
) -> ((f64, f64), f64) {
    let eval = |p: (f64, f64)| -> f64 {
        let p = bounds.clamp(p);
        f(p.0, p.1).unwrap_or(f64::NEG_INFINITY)
    };
    let mut simplex = vec![
        start,
        bounds.clamp((start.0 + scale, start.1)),
        bounds.clamp((start.0, start.1 + scale)),
    ];
    let mut values: Vec<f64> = simplex.iter().map(|&p| eval(p)).collect();

    for _ in 0..max_iter {
        // order best..worst
        let mut idx = [0, 1, 2];
        idx.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
        simplex = idx.iter().map(|&i| simplex[i]).collect();
        values = idx.iter().map(|&i| values[i]).collect();

        let diameter = simplex
            .iter()
            .flat_map(|a| simplex.iter().map(move |b| (a.0 - b.0).hypot(a.1 - b.1)))
            .fold(0.0, f64::max);
        if diameter < simplex_tol {
            break;
        }

        let centroid = (
            0.5 * (simplex[0].0 + simplex[1].0),
            0.5 * (simplex[0].1 + simplex[1].1),
        );
        let worst = simplex[2];
        let reflect = (2.0 * centroid.0 - worst.0, 2.0 * centroid.1 - worst.1);
        let v_reflect = eval(reflect);

        if v_reflect > values[0] {
            let expand = (
                3.0 * centroid.0 - 2.0 * worst.0,
                3.0 * centroid.1 - 2.0 * worst.1,
            );
            let v_expand = eval(expand);
            if v_expand > v_reflect {
                simplex[2] = bounds.clamp(expand);
                values[2] = v_expand;
            } else {
                simplex[2] = bounds.clamp(reflect);
                values[2] = v_reflect;
            }
        } else if v_reflect > values[1] {
            simplex[2] = bounds.clamp(reflect);
            values[2] = v_reflect;
        } else {
            let contract = (0.5 * (centroid.0 + worst.0), 0.5 * (centroid.1 + worst.1));
            let v_contract = eval(contract);
            if v_contract > values[2] {
                simplex[2] = bounds.clamp(contract);
                values[2] = v_contract;
            } else {
                // shrink toward the best vertex
                for i in 1..3 {
                    simplex[i] = bounds.clamp((
                        0.5 * (simplex[0].0 + simplex[i].0),
                        0.5 * (simplex[0].1 + simplex[i].1),
                    ));
                    values[i] = eval(simplex[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..3 {
        if values[i] > values[best] {
            best = i;
        }
    }
    (simplex[best], values[best])
}

/// Grid-seeded multi-start maximization of a two-switch objective.
///
/// Besides the uniform grid, a halving ladder of dusk-centred windows is
/// seeded so that regimes whose feasible set is a thin band around the
/// day/night boundary (strong respiration, tight flow budget) are never
/// missed.
fn optimize_switches<F: Fn(f64, f64) -> Option<f64> + Sync>(
    f: &F,
    bounds: Bounds,
    day_length: f64,
    opts: &SolverOptions,
) -> Option<((f64, f64), f64)> {
    let g = opts.grid_per_axis;
    let mut grid: Vec<(f64, f64)> = (0..g)
        .flat_map(|i| {
            (0..g).map(move |j| {
                (
                    bounds.lo.0 + (bounds.hi.0 - bounds.lo.0) * (i as f64 + 0.5) / g as f64,
                    bounds.lo.1 + (bounds.hi.1 - bounds.lo.1) * (j as f64 + 0.5) / g as f64,
                )
            })
        })
        .collect();
    let w_max = (day_length - bounds.lo.0).min(bounds.hi.1 - day_length);
    for k in 0..12 {
        let half = w_max * 0.5f64.powi(k);
        grid.push((day_length - half, day_length + half));
    }
    let mut scored: Vec<((f64, f64), f64)> = grid
        .par_iter()
        .filter_map(|&p| f(p.0, p.1).map(|v| (p, v)))
        .collect();
    if scored.is_empty() {
        return None;
    }
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap()
            .then(a.0 .0.partial_cmp(&b.0 .0).unwrap())
    });
    scored.truncate(opts.starts);

    let spacing = (
        (bounds.hi.0 - bounds.lo.0) / (2.0 * g as f64),
        (bounds.hi.1 - bounds.lo.1) / (2.0 * g as f64),
    );
    let mut local: Vec<((f64, f64), f64)> = scored
        .par_iter()
        .map(|&(p, _)| compass(f, p, spacing, bounds, opts.pattern_min_step))
        .collect();
    local.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap()
            .then(a.0 .0.partial_cmp(&b.0 .0).unwrap())
    });
    local.truncate(2);

    local
        .into_iter()
        .map(|(p, _)| {
            nelder_mead(
                f,
                p,
                4.0 * opts.pattern_min_step.max(opts.simplex_tol),
                bounds,
                opts.simplex_tol,
                opts.nm_max_iter,
            )
        })
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .filter(|&(_, v)| v > f64::NEG_INFINITY)
}

/// Solve the periodic yield-maximization problem over all admissible
/// structures with the default budget.
pub fn solve(params: &ReactorParams) -> Result<OptimalSolution> {
    solve_with(params, &SolverOptions::default())
}

pub fn solve_with(params: &ReactorParams, opts: &SolverOptions) -> Result<OptimalSolution> {
    let feas = params.feasibility();
    if !feas.growth_assumption {
        // only wash-out is possible
        return Err(Error::AssumptionViolated {
            margin: feas.growth_margin,
        });
    }
    let td = params.day_length;
    let eps = 1e-6 * params.period;

    let mut finalists: Vec<StructureEval> = Vec::new();

    if feas.constant_max_possible {
        if let Ok(eval) = evaluate_structure(params, CandidateStructure::ConstantMax, opts.step) {
            finalists.push(eval);
        }
    }

    let bb_bounds = Bounds {
        lo: (eps, td + eps),
        hi: (td - eps, params.period - eps),
    };
    let bb_obj = |t1: f64, t2: f64| bang_bang_yield(params, t1, t2, opts.step);
    if let Some(((t1, t2), _)) = optimize_switches(&bb_obj, bb_bounds, td, opts) {
        if let Ok(eval) = evaluate_structure(
            params,
            CandidateStructure::BangBang {
                t_open: t1,
                t_close: t2,
            },
            opts.step,
        ) {
            finalists.push(eval);
        }
    }

    if feas.singular_possible {
        let sb_obj = |te: f64, tc: f64| singular_yield(params, te, tc, opts.step);
        if let Some(((te, tc), _)) = optimize_switches(&sb_obj, bb_bounds, td, opts) {
            if let Ok(eval) = evaluate_structure(
                params,
                CandidateStructure::BangSingularBang {
                    t_exit: te,
                    t_close: tc,
                },
                opts.step,
            ) {
                finalists.push(eval);
            }
        }
    }

    if finalists.is_empty() {
        return Err(Error::SolverStalled);
    }

    let verified: Vec<(StructureEval, PmpReport)> = finalists
        .into_iter()
        .map(|e| {
            let report = verify_with(params, &e.trajectory, opts.pmp_tolerances);
            (e, report)
        })
        .collect();

    let candidates: Vec<CandidateSummary> = verified
        .iter()
        .map(|(e, r)| CandidateSummary {
            structure: e.structure,
            total_yield: e.total_yield(),
            total_flow: e.total_flow(),
            pmp_pass: r.pass(),
        })
        .collect();

    // highest verified yield wins; ties go to the lower hydraulic effort;
    // fall back to the best unverified candidate only if nothing passes
    let pick = |pool: Vec<&(StructureEval, PmpReport)>| -> Option<usize> {
        let mut best: Option<(usize, f64, f64)> = None;
        for (i, (e, _)) in pool.iter().enumerate() {
            let (y, fl) = (e.total_yield(), e.total_flow());
            best = match best {
                None => Some((i, y, fl)),
                Some((bi, by, bf)) => {
                    if y > by + 1e-8 || ((y - by).abs() <= 1e-8 && fl < bf) {
                        Some((i, y, fl))
                    } else {
                        Some((bi, by, bf))
                    }
                }
            };
        }
        best.map(|(i, _, _)| i)
    };

    let passing: Vec<&(StructureEval, PmpReport)> =
        verified.iter().filter(|(_, r)| r.pass()).collect();
    let chosen = if let Some(i) = pick(passing.clone()) {
        passing[i].clone()
    } else {
        let all: Vec<&(StructureEval, PmpReport)> = verified.iter().collect();
        let i = pick(all.clone()).expect("finalists nonempty");
        all[i].clone()
    };

    let (eval, pmp) = chosen;
    Ok(OptimalSolution {
        structure: eval.structure,
        family: eval.structure.family(),
        policy: eval.trajectory.policy.clone(),
        x0: eval.x0,
        total_yield: eval.total_yield(),
        total_flow: eval.total_flow(),
        trajectory: eval.trajectory,
        pmp,
        candidates,
    })
}

/// Family of the optimal solution, `NoSolution` when only wash-out exists.
pub fn classify(params: &ReactorParams, opts: &SolverOptions) -> FamilyLabel {
    match solve_with(params, opts) {
        Ok(sol) => sol.family,
        Err(_) => FamilyLabel::NoSolution,
    }
}

/// Best constant-dilution reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestConstant {
    pub dilution: f64,
    pub x0: f64,
    pub total_yield: f64,
    /// Equals the dilution for a unit period.
    pub total_flow: f64,
}

/// Maximize the periodic yield over constant policies `u in [0, u_max]`:
/// a 64-point bracketing grid followed by golden-section refinement.
pub fn best_constant(params: &ReactorParams, opts: &SolverOptions) -> BestConstant {
    let run = |u: f64| -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let policy = match ControlPolicy::constant(u, params) {
            Ok(p) => p,
            Err(_) => return 0.0,
        };
        match periodic_state(params, &policy, opts.step) {
            Ok(x0) => integrate_terminal(params, x0, &policy, opts.step)
                .map(|t| t.total_yield)
                .unwrap_or(0.0),
            Err(_) => 0.0,
        }
    };

    const GRID: usize = 64;
    let us: Vec<f64> = (0..GRID)
        .map(|k| params.dilution_max * k as f64 / (GRID - 1) as f64)
        .collect();
    let yields: Vec<f64> = us.par_iter().map(|&u| run(u)).collect();
    let k_best = yields
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(k, _)| k)
        .unwrap_or(0);

    let lo = if k_best == 0 { 0.0 } else { us[k_best - 1] };
    let hi = if k_best + 1 < GRID {
        us[k_best + 1]
    } else {
        params.dilution_max
    };
    let (u_hat, best_yield) = golden_max(run, lo, hi, 1e-7 * params.dilution_max.max(1.0));

    if best_yield <= 0.0 {
        return BestConstant {
            dilution: 0.0,
            x0: 0.0,
            total_yield: 0.0,
            total_flow: 0.0,
        };
    }
    let policy = ControlPolicy::constant(u_hat, params).expect("u_hat within bounds");
    let x0 = periodic_state(params, &policy, opts.step).expect("positive yield implies an orbit");
    BestConstant {
        dilution: u_hat,
        x0,
        total_yield: best_yield,
        total_flow: u_hat * params.period,
    }
}

/// Dusk-centred maximal-dilution window with total flow `flow`:
/// the near-optimal reference strategy.
pub fn near_optimal_window(
    params: &ReactorParams,
    flow: f64,
    opts: &SolverOptions,
) -> Result<(ControlPolicy, f64, f64)> {
    let policy = ControlPolicy::harvest_window(flow, params)?;
    if flow == 0.0 {
        return Ok((policy, 0.0, 0.0));
    }
    let x0 = periodic_state(params, &policy, opts.step)?;
    let total_yield = integrate_terminal(params, x0, &policy, opts.step)?.total_yield;
    Ok((policy, x0, total_yield))
}

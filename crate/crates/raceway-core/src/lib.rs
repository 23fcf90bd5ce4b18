//! Periodic optimal control of light/dark-forced photobioreactors.
//!
//! The library models a perfectly mixed raceway whose surfacic biomass
//! density grows by a concave light-limited law during the day, respires
//! around the clock, and is harvested through a bounded dilution rate.
//! It solves for the dilution schedule maximizing the daily harvest over
//! periodic orbits, audits candidates against the maximum-principle
//! necessary conditions, and sweeps parameter planes into plot-ready CSV.
//!
//! Modules, bottom-up:
//!
//! - [`growth`]: concave growth laws and their closed-form critical points
//! - [`dynamics`]: piecewise policies, the forced-period integrator, the
//!   one-period map and its periodic fixed points
//! - [`pmp`]: periodic costate and the necessary-conditions verifier
//! - [`solver`]: structure-parameterized yield maximization and the
//!   reference strategies
//! - [`analysis`]: bifurcation, contour, flow-comparison and fishing
//!   scenario sweeps
//! - [`export`]: deterministic CSV/text emission

// `!(v > 0)`-style guards must reject NaN, which `v <= 0` would admit.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod growth;
pub mod numeric;
pub mod pmp;
pub mod solver;

pub use analysis::{
    bifurcation_grid, bifurcation_sweep, fishing_scenario, fishing_scenario_with, flow_sweep,
    productivity_contour, washout_flow, BifurcationGrid, ContourGrid, FishingReport,
    FlowComparison,
};
pub use dynamics::full_model::{FullModelParams, FullModelState, FullSample};
pub use dynamics::{
    feasible_interval, integrate, integrate_terminal, periodic_state, poincare_map, ControlPolicy,
    Mode, ReactorParams, Sample, Segment, Trajectory,
};
pub use error::{Error, Result};
pub use growth::{BeerLambertMonod, FeasibilityReport, GrowthModel, LogisticGrowth};
pub use pmp::{adjoint_periodic, hamiltonian, AdjointTrajectory, PmpReport, PmpTolerances};
pub use solver::{
    best_constant, classify, evaluate_structure, near_optimal_window, solve, solve_with,
    BestConstant, CandidateStructure, CandidateSummary, FamilyLabel, OptimalSolution,
    SolverOptions, StructureEval,
};

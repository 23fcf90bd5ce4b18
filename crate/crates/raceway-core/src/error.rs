//! Error type shared across the toolkit.

use thiserror::Error;

/// Errors produced by growth models, integrators, and solvers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Biomass arguments must be non-negative.
    #[error("negative biomass x = {x}")]
    NegativeBiomass { x: f64 },

    /// Logistic growth is only meaningful where f(x) >= 0.
    #[error("biomass x = {x} outside growth-model domain [0, {max}]")]
    DomainExceeded { x: f64, max: f64 },

    /// `f'(0) <= r`: productivity has no interior maximum.
    #[error("no interior optimum: f'(0) = {f_prime_zero} <= r = {r}")]
    NoInteriorOptimum { f_prime_zero: f64, r: f64 },

    /// A control policy violated its structural invariants.
    #[error("invalid policy: {0}")]
    PolicyInvalid(String),

    /// The integrator drove the state below zero.
    #[error("state became negative: x = {x} at t = {t}")]
    StateNegative { t: f64, x: f64 },

    /// No positive periodic orbit exists for the requested policy.
    #[error("no positive periodic fixed point (wash-out only)")]
    NoPositiveFixedPoint,

    /// The day-growth condition `f'(0)*T_day > r*T` fails.
    #[error("growth assumption violated: f'(0)*T_day - r*T = {margin}")]
    AssumptionViolated { margin: f64 },

    /// The periodic adjoint equation has no unique (or no nontrivial) solution.
    #[error("degenerate adjoint monodromy: multiplier = {multiplier}")]
    DegenerateMonodromy { multiplier: f64 },

    /// A candidate control structure admits no periodic orbit.
    #[error("infeasible structure: {0}")]
    Infeasible(String),

    /// No candidate structure admitted a periodic orbit.
    #[error("solver stalled: no structure admits a periodic orbit")]
    SolverStalled,

    /// Requested harvest window does not fit inside the period.
    #[error("harvest window out of range: flow target {flow} exceeds {max}")]
    WindowOutOfRange { flow: f64, max: f64 },

    /// Invalid parameter set.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;

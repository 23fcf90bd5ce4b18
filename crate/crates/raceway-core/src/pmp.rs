//! Costate computation and verification of the maximum-principle
//! necessary conditions on candidate periodic solutions.
//!
//! The adjoint obeys `dλ/dt = λ(-f'(x)h(t) + r + u) - u` with the periodic
//! boundary condition `λ(T) = λ(0)`. The equation is linear in `λ`, so the
//! periodic solution is obtained without shooting: one forward pass yields
//! the fundamental multiplier `Φ = exp(∫ a dt)` and the particular response
//! `p(T)`, from which `λ(0) = p(T)/(1 - Φ)`; a second pass reconstructs
//! `λ(t)`. Switch admissibility, Hamiltonian constancy per light phase,
//! and the singular-arc conditions are then checked sample-wise.

use crate::dynamics::{pieces, Mode, ReactorParams, Trajectory};
use crate::error::{Error, Result};

/// Periodic costate path aligned with the state trajectory's sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointTrajectory {
    /// Ordered `(t, lambda)` samples at the state trajectory's times.
    pub samples: Vec<(f64, f64)>,
    pub lambda0: f64,
}

impl AdjointTrajectory {
    /// Costate at time `t` by linear interpolation.
    pub fn lambda_at(&self, t: f64) -> f64 {
        let s = &self.samples;
        match s.binary_search_by(|p| p.0.partial_cmp(&t).unwrap()) {
            Ok(i) => s[i].1,
            Err(0) => s[0].1,
            Err(i) if i >= s.len() => s[s.len() - 1].1,
            Err(i) => {
                let (a, b) = (s[i - 1], s[i]);
                a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
            }
        }
    }
}

/// Maximum-principle Hamiltonian `λ(f(x)h - rx - ux) + ux`.
pub fn hamiltonian(params: &ReactorParams, x: f64, lambda: f64, u: f64, light: f64) -> f64 {
    lambda * (params.model.f_unchecked(x) * light - params.respiration * x - u * x) + u * x
}

/// Exact update of `dv/dt = a v - u` with constant coefficients over `dt`.
fn linear_update(v: f64, a: f64, u: f64, dt: f64) -> f64 {
    if a == 0.0 {
        v - u * dt
    } else {
        let e = (a * dt).exp();
        e * v - u * (e - 1.0) / a
    }
}

/// Periodic costate along a state trajectory.
///
/// Fails with [`Error::DegenerateMonodromy`] when the periodic adjoint is
/// not unique (`Φ ≈ 1`) or only the trivial `λ ≡ 0` exists (policy never
/// harvests, so the inhomogeneous term vanishes).
pub fn adjoint_periodic(params: &ReactorParams, traj: &Trajectory) -> Result<AdjointTrajectory> {
    let policy = &traj.policy;
    let step = traj.step;

    // pass 1: multiplier and particular response over one period
    let mut x = traj.x0;
    let mut log_phi = 0.0;
    let mut p = 0.0;
    for piece in pieces(params, policy) {
        let u = piece.mode.dilution(params);
        let span = piece.end - piece.start;
        match (piece.mode, piece.light) {
            (Mode::Singular, true) => {
                // on the arc f'(x_sigma) = r, so a = u_sigma exactly
                let a = params.u_sigma()?;
                log_phi += a * span;
                p = linear_update(p, a, u, span);
                x = params.x_sigma()?;
            }
            (_, false) => {
                let a = params.respiration + u;
                log_phi += a * span;
                p = linear_update(p, a, u, span);
                x *= (-(params.respiration + u) * span).exp();
            }
            (_, true) => {
                let n = (span / step).ceil().max(1.0) as usize;
                let h = span / n as f64;
                let loss = params.respiration + u;
                for _ in 0..n {
                    let rhs = |x: f64, p: f64| {
                        let a = -params.model.f_prime_unchecked(x) + loss;
                        (params.model.f_unchecked(x) - loss * x, a, a * p - u)
                    };
                    let (k1x, k1l, k1p) = rhs(x, p);
                    let (k2x, k2l, k2p) = rhs(x + 0.5 * h * k1x, p + 0.5 * h * k1p);
                    let (k3x, k3l, k3p) = rhs(x + 0.5 * h * k2x, p + 0.5 * h * k2p);
                    let (k4x, k4l, k4p) = rhs(x + h * k3x, p + h * k3p);
                    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
                    log_phi += h / 6.0 * (k1l + 2.0 * k2l + 2.0 * k3l + k4l);
                    p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
                }
            }
        }
    }

    let phi = log_phi.exp();
    if (1.0 - phi).abs() < 1e-10 || policy.nominal_flow(params) == 0.0 {
        return Err(Error::DegenerateMonodromy { multiplier: phi });
    }
    let lambda0 = p / (1.0 - phi);

    // pass 2: reconstruct lambda on the same grid the state pass used
    let mut x = traj.x0;
    let mut lambda = lambda0;
    let mut samples = Vec::with_capacity(traj.samples.len());
    for piece in pieces(params, policy) {
        let u = piece.mode.dilution(params);
        let span = piece.end - piece.start;
        samples.push((piece.start, lambda));
        match (piece.mode, piece.light) {
            (Mode::Singular, true) => {
                let a = params.u_sigma()?;
                let n = (span / step).ceil().max(1.0) as usize;
                for i in 1..n {
                    let dt = span * i as f64 / n as f64;
                    samples.push((piece.start + dt, linear_update(lambda, a, u, dt)));
                }
                lambda = linear_update(lambda, a, u, span);
                x = params.x_sigma()?;
            }
            (_, false) => {
                let a = params.respiration + u;
                let n = (span / step).ceil().max(1.0) as usize;
                for i in 1..n {
                    let dt = span * i as f64 / n as f64;
                    samples.push((piece.start + dt, linear_update(lambda, a, u, dt)));
                }
                lambda = linear_update(lambda, a, u, span);
                x *= (-a * span).exp();
            }
            (_, true) => {
                let n = (span / step).ceil().max(1.0) as usize;
                let h = span / n as f64;
                let loss = params.respiration + u;
                for i in 0..n {
                    let rhs = |x: f64, l: f64| {
                        let a = -params.model.f_prime_unchecked(x) + loss;
                        (params.model.f_unchecked(x) - loss * x, a * l - u)
                    };
                    let (k1x, k1l) = rhs(x, lambda);
                    let (k2x, k2l) = rhs(x + 0.5 * h * k1x, lambda + 0.5 * h * k1l);
                    let (k3x, k3l) = rhs(x + 0.5 * h * k2x, lambda + 0.5 * h * k2l);
                    let (k4x, k4l) = rhs(x + h * k3x, lambda + h * k3l);
                    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
                    lambda += h / 6.0 * (k1l + 2.0 * k2l + 2.0 * k3l + k4l);
                    if i + 1 < n {
                        samples.push((piece.start + h * (i + 1) as f64, lambda));
                    }
                }
            }
        }
    }
    samples.push((params.period, lambda));
    Ok(AdjointTrajectory { samples, lambda0 })
}

/// Tolerances for [`verify`], calibrated to RK4 at step 1e-4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmpTolerances {
    /// Allowed `|λ - 1|` at interior switches.
    pub switch_lambda: f64,
    /// Allowed relative Hamiltonian drift within each light phase.
    pub hamiltonian_drift: f64,
    /// Allowed relative `|x - x_sigma|` on singular arcs.
    pub singular_state: f64,
    /// Allowed `|λ(T) - λ(0)|` relative to `max(1, λ(0))`.
    pub adjoint_periodicity: f64,
}

impl Default for PmpTolerances {
    fn default() -> Self {
        Self {
            switch_lambda: 1e-3,
            hamiltonian_drift: 1e-4,
            singular_state: 1e-6,
            adjoint_periodicity: 1e-8,
        }
    }
}

/// Costate value at one interior switch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchCheck {
    pub t: f64,
    pub lambda: f64,
    /// `|λ - 1|`
    pub error: f64,
}

/// Outcome of verifying every necessary condition on a candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct PmpReport {
    pub lambda0: f64,
    /// `|λ(T) - λ(0)|`
    pub lambda_period_gap: f64,
    pub switch_lambda_errors: Vec<SwitchCheck>,
    /// Max relative Hamiltonian deviation over the bright phase.
    pub hamiltonian_drift_day: f64,
    /// Max relative Hamiltonian deviation over the dark phase.
    pub hamiltonian_drift_night: f64,
    /// Per policy segment: costate side consistent with the control.
    pub sign_consistency: Vec<bool>,
    /// No dilution increase in the dark phase.
    pub no_dark_opening: bool,
    /// Openings at `x <= x_sigma`, closings in light at `x >= x_sigma`.
    pub switch_levels_ok: bool,
    /// Singular segments hold `x = x_sigma` with `λ = 1`; `None` without arcs.
    pub singular_arc_ok: Option<bool>,
    /// Second-order condition `-f''(x_sigma) >= 0`; `None` without an
    /// interior productivity optimum.
    pub kelley_ok: Option<bool>,
    /// State at the closing switch strictly below the opening one;
    /// `None` for constant policies.
    pub bang_ordering_ok: Option<bool>,
    pub tolerances: PmpTolerances,
    /// Names of violated conditions; empty means the candidate passed.
    pub violations: Vec<String>,
}

impl PmpReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }

    fn failed(reason: &str, tolerances: PmpTolerances) -> Self {
        PmpReport {
            lambda0: f64::NAN,
            lambda_period_gap: f64::NAN,
            switch_lambda_errors: Vec::new(),
            hamiltonian_drift_day: f64::NAN,
            hamiltonian_drift_night: f64::NAN,
            sign_consistency: Vec::new(),
            no_dark_opening: false,
            switch_levels_ok: false,
            singular_arc_ok: None,
            kelley_ok: None,
            bang_ordering_ok: None,
            tolerances,
            violations: vec![reason.to_string()],
        }
    }
}

/// Verify every maximum-principle necessary condition on a candidate
/// periodic trajectory. Returns a failing report rather than an error on
/// any well-formed candidate.
pub fn verify(params: &ReactorParams, traj: &Trajectory) -> PmpReport {
    verify_with(params, traj, PmpTolerances::default())
}

pub fn verify_with(params: &ReactorParams, traj: &Trajectory, tol: PmpTolerances) -> PmpReport {
    let adjoint = match adjoint_periodic(params, traj) {
        Ok(a) => a,
        Err(e) => return PmpReport::failed(&format!("adjoint: {e}"), tol),
    };
    let mut violations = Vec::new();

    let lambda_end = adjoint.samples.last().map(|s| s.1).unwrap_or(f64::NAN);
    let lambda_period_gap = (lambda_end - adjoint.lambda0).abs();
    if lambda_period_gap > tol.adjoint_periodicity * adjoint.lambda0.abs().max(1.0) {
        violations.push("adjoint-periodicity".into());
    }

    let x_sigma = params.x_sigma().ok();

    // (a) lambda = 1 at every interior switch
    let switches = traj.policy.switch_times(params);
    let switch_lambda_errors: Vec<SwitchCheck> = switches
        .iter()
        .map(|&(t, _, _)| {
            let lambda = adjoint.lambda_at(t);
            SwitchCheck {
                t,
                lambda,
                error: (lambda - 1.0).abs(),
            }
        })
        .collect();
    if switch_lambda_errors
        .iter()
        .any(|c| c.error > tol.switch_lambda)
    {
        violations.push("switch-lambda".into());
    }

    // (b) control on the side of the costate dictated by dH/du = (1-λ)x
    let mut sign_consistency = Vec::new();
    for seg in traj.policy.segments() {
        let buffer = (2.0 * traj.step).min(0.25 * (seg.end - seg.start));
        let interior = adjoint
            .samples
            .iter()
            .filter(|(t, _)| *t > seg.start + buffer && *t < seg.end - buffer);
        let ok = match seg.mode {
            Mode::Closed => interior.clone().all(|&(_, l)| l >= 1.0 - tol.switch_lambda),
            Mode::Max => interior.clone().all(|&(_, l)| l <= 1.0 + tol.switch_lambda),
            Mode::Singular => interior
                .clone()
                .all(|&(_, l)| (l - 1.0).abs() <= tol.switch_lambda),
            // interior constant control is only stationary on λ = 1
            Mode::Const(u) if u > 0.0 && u < params.dilution_max => interior
                .clone()
                .all(|&(_, l)| (l - 1.0).abs() <= tol.switch_lambda),
            Mode::Const(u) => {
                if u == 0.0 {
                    interior.clone().all(|&(_, l)| l >= 1.0 - tol.switch_lambda)
                } else {
                    interior.clone().all(|&(_, l)| l <= 1.0 + tol.switch_lambda)
                }
            }
        };
        sign_consistency.push(ok);
    }
    if sign_consistency.iter().any(|ok| !ok) {
        violations.push("sign-consistency".into());
    }

    // (c) Hamiltonian constant within each light phase
    let mut day = Vec::new();
    let mut night = Vec::new();
    for (s, &(t, l)) in traj.samples.iter().zip(adjoint.samples.iter()) {
        debug_assert!((s.t - t).abs() < 1e-9);
        let h_val = hamiltonian(params, s.x, l, s.u, s.light);
        if s.light == 1.0 {
            day.push(h_val);
        } else {
            night.push(h_val);
        }
    }
    let drift = |vals: &[f64]| -> f64 {
        if vals.is_empty() {
            return 0.0;
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let max_dev = vals.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
        max_dev / mean.abs().max(1e-12)
    };
    let hamiltonian_drift_day = drift(&day);
    let hamiltonian_drift_night = drift(&night);
    if hamiltonian_drift_day > tol.hamiltonian_drift {
        violations.push("hamiltonian-day".into());
    }
    if hamiltonian_drift_night > tol.hamiltonian_drift {
        violations.push("hamiltonian-night".into());
    }

    // (d) no dilution increase in the dark phase
    let no_dark_opening = switches
        .iter()
        .all(|&(t, before, after)| after <= before || t < params.day_length - 1e-12);
    if !no_dark_opening {
        violations.push("dark-opening".into());
    }

    // (e) opening switches below x_sigma, bright closings above it
    let switch_levels_ok = match x_sigma {
        None => true,
        Some(xs) => {
            let tol_x = tol.singular_state * xs.max(1.0) + 1e-9;
            switches.iter().all(|&(t, before, after)| {
                let x = traj.state_at(t);
                if after > before && before == 0.0 {
                    x <= xs + tol_x
                } else if after == 0.0 && t < params.day_length - 1e-12 {
                    x >= xs - tol_x
                } else {
                    true
                }
            })
        }
    };
    if !switch_levels_ok {
        violations.push("switch-level".into());
    }

    // (f) singular arcs hold the optimum with unit costate
    let singular_segments: Vec<_> = traj
        .policy
        .segments()
        .iter()
        .filter(|s| s.mode == Mode::Singular)
        .copied()
        .collect();
    let singular_arc_ok = if singular_segments.is_empty() {
        None
    } else {
        let xs = x_sigma.unwrap_or(f64::NAN);
        let ok = singular_segments.iter().all(|seg| {
            let state_ok = traj
                .samples
                .iter()
                .filter(|s| s.t >= seg.start && s.t <= seg.end)
                .all(|s| (s.x - xs).abs() <= tol.singular_state * xs.max(1.0));
            let costate_ok = adjoint
                .samples
                .iter()
                .filter(|(t, _)| *t >= seg.start && *t <= seg.end)
                .all(|(_, l)| (l - 1.0).abs() <= tol.switch_lambda);
            state_ok && costate_ok
        });
        Some(ok)
    };
    if singular_arc_ok == Some(false) {
        violations.push("singular-arc".into());
    }

    // Kelley second-order condition at the singular level
    let kelley_ok = x_sigma.map(|xs| -params.model.eval_f_second(xs).unwrap_or(1.0) >= 0.0);
    if kelley_ok == Some(false) {
        violations.push("kelley".into());
    }

    // (g) closing switch at strictly lower biomass than the opening one
    let open = switches
        .iter()
        .find(|&&(_, before, after)| after > before && (after - params.dilution_max).abs() < 1e-12);
    let close = switches
        .iter()
        .rev()
        .find(|&&(_, before, after)| after == 0.0 && (before - params.dilution_max).abs() < 1e-12);
    let bang_ordering_ok = match (open, close) {
        (Some(&(t_open, _, _)), Some(&(t_close, _, _))) if t_close > t_open => {
            Some(traj.state_at(t_close) < traj.state_at(t_open))
        }
        _ => None,
    };
    if bang_ordering_ok == Some(false) {
        violations.push("bang-ordering".into());
    }

    PmpReport {
        lambda0: adjoint.lambda0,
        lambda_period_gap,
        switch_lambda_errors,
        hamiltonian_drift_day,
        hamiltonian_drift_night,
        sign_consistency,
        no_dark_opening,
        switch_levels_ok,
        singular_arc_ok,
        kelley_ok,
        bang_ordering_ok,
        tolerances: tol,
        violations,
    }
}

impl std::fmt::Display for PmpReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "verdict: {}", if self.pass() { "pass" } else { "fail" })?;
        if !self.violations.is_empty() {
            writeln!(f, "violations: {}", self.violations.join(","))?;
        }
        writeln!(f, "lambda0: {:.12e}", self.lambda0)?;
        writeln!(f, "lambda_period_gap: {:.12e}", self.lambda_period_gap)?;
        for c in &self.switch_lambda_errors {
            writeln!(f, "switch_lambda[t={:.6}]: {:.12e}", c.t, c.lambda)?;
        }
        writeln!(
            f,
            "hamiltonian_drift_day: {:.12e}",
            self.hamiltonian_drift_day
        )?;
        writeln!(
            f,
            "hamiltonian_drift_night: {:.12e}",
            self.hamiltonian_drift_night
        )?;
        writeln!(f, "no_dark_opening: {}", self.no_dark_opening)?;
        writeln!(f, "switch_levels_ok: {}", self.switch_levels_ok)?;
        if let Some(v) = self.singular_arc_ok {
            writeln!(f, "singular_arc_ok: {v}")?;
        }
        if let Some(v) = self.kelley_ok {
            writeln!(f, "kelley_ok: {v}")?;
        }
        if let Some(v) = self.bang_ordering_ok {
            writeln!(f, "bang_ordering_ok: {v}")?;
        }
        Ok(())
    }
}

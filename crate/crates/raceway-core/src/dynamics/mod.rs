//! Forced scalar biomass dynamics under piecewise dilution policies.
//!
//! The state is the surfacic biomass density `x`, driven by
//! `dx/dt = f(x)*h(t) - r*x - u(t)*x` where `h` is the day/night step
//! function (1 on `[0, T_day)`, 0 on `[T_day, T)`). Integration is
//! segment-by-segment fixed-step RK4 with the day/night breakpoint and
//! every policy switch hit exactly; segments whose dynamics are linear
//! (night, or any constant-dilution dark stretch) use the closed-form
//! exponential instead of quadrature.

pub mod full_model;

use crate::error::{Error, Result};
use crate::growth::{FeasibilityReport, GrowthModel};

/// Relative mismatch tolerated between the state and the singular level
/// when a singular segment begins.
pub const SINGULAR_TOL: f64 = 1e-6;

/// Times closer than this are considered the same breakpoint.
const TIME_EPS: f64 = 1e-12;

/// Growth model plus the reactor forcing and actuator data.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactorParams {
    pub model: GrowthModel,
    /// Respiration + mortality rate `r` (day^-1), active day and night.
    pub respiration: f64,
    /// Period length `T` (day).
    pub period: f64,
    /// Bright-phase length (day), strictly inside `(0, period)`.
    pub day_length: f64,
    /// Dilution actuator bound (day^-1).
    pub dilution_max: f64,
}

impl ReactorParams {
    pub fn new(
        model: GrowthModel,
        respiration: f64,
        period: f64,
        day_length: f64,
        dilution_max: f64,
    ) -> Result<Self> {
        if !(period > 0.0 && day_length > 0.0 && day_length < period) {
            return Err(Error::InvalidParams(format!(
                "need 0 < day_length < period, got day_length = {day_length}, period = {period}"
            )));
        }
        if respiration < 0.0 {
            return Err(Error::InvalidParams("respiration must be >= 0".into()));
        }
        if dilution_max <= 0.0 {
            return Err(Error::InvalidParams("dilution_max must be > 0".into()));
        }
        Ok(Self {
            model,
            respiration,
            period,
            day_length,
            dilution_max,
        })
    }

    /// Reference raceway for *Isochrysis galbana*: `r = 0.07`, equinox
    /// forcing, `u_max = 2`.
    pub fn isochrysis_galbana() -> Self {
        Self {
            model: crate::growth::BeerLambertMonod::isochrysis_galbana().into(),
            respiration: 0.07,
            period: 1.0,
            day_length: 0.5,
            dilution_max: 2.0,
        }
    }

    /// Seasonal fishing-stock scenario: logistic growth, short growing
    /// season, mortality during the rest of the year.
    pub fn fishing_stock() -> Self {
        Self {
            model: crate::growth::LogisticGrowth::new(6.0, 10.0, 1.0)
                .unwrap()
                .into(),
            respiration: 1.0,
            period: 1.0,
            day_length: 0.2,
            dilution_max: 2.0,
        }
    }

    pub fn x_sigma(&self) -> Result<f64> {
        self.model.x_sigma(self.respiration)
    }

    pub fn u_sigma(&self) -> Result<f64> {
        self.model.u_sigma(self.respiration)
    }

    /// Closed-reactor equilibrium of the bright-phase dynamics.
    pub fn closed_equilibrium(&self) -> f64 {
        self.model.equilibrium(self.respiration, 0.0)
    }

    pub fn feasibility(&self) -> FeasibilityReport {
        FeasibilityReport::evaluate(
            &self.model,
            self.respiration,
            self.period,
            self.day_length,
            self.dilution_max,
        )
    }
}

/// Dilution regime on one policy segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Reactor closed, `u = 0`.
    Closed,
    /// Maximal dilution, `u = u_max`.
    Max,
    /// Singular arc: the state is held at `x_sigma` with `u = u_sigma`;
    /// only admissible in the bright phase.
    Singular,
    /// Constant dilution at the given rate.
    Const(f64),
}

impl Mode {
    pub(crate) fn dilution(&self, params: &ReactorParams) -> f64 {
        match self {
            Mode::Closed => 0.0,
            Mode::Max => params.dilution_max,
            Mode::Singular => params.u_sigma().expect("validated at policy construction"),
            Mode::Const(u) => *u,
        }
    }
}

/// One half-open span `[start, end)` of a policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub mode: Mode,
}

/// An ordered piecewise-constant/singular control over a full period.
///
/// Segments partition `[0, T]` exactly: contiguous, non-overlapping,
/// first start at 0, last end at `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPolicy {
    segments: Vec<Segment>,
}

impl ControlPolicy {
    pub fn new(segments: Vec<Segment>, params: &ReactorParams) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::PolicyInvalid("policy has no segments".into()));
        }
        if segments[0].start.abs() > TIME_EPS {
            return Err(Error::PolicyInvalid(format!(
                "first segment starts at {} instead of 0",
                segments[0].start
            )));
        }
        if (segments.last().unwrap().end - params.period).abs() > TIME_EPS {
            return Err(Error::PolicyInvalid(format!(
                "last segment ends at {} instead of {}",
                segments.last().unwrap().end,
                params.period
            )));
        }
        let mut snapped = segments;
        snapped[0].start = 0.0;
        let n = snapped.len();
        snapped[n - 1].end = params.period;
        for i in 0..snapped.len() {
            let seg = snapped[i];
            if seg.end <= seg.start {
                return Err(Error::PolicyInvalid(format!(
                    "segment {i} is empty or reversed: [{}, {}]",
                    seg.start, seg.end
                )));
            }
            if i + 1 < snapped.len() {
                if (snapped[i + 1].start - seg.end).abs() > TIME_EPS {
                    return Err(Error::PolicyInvalid(format!(
                        "gap or overlap between segments {i} and {}",
                        i + 1
                    )));
                }
                snapped[i + 1].start = seg.end;
            }
            match seg.mode {
                Mode::Const(u) => {
                    if !(0.0..=params.dilution_max + TIME_EPS).contains(&u) {
                        return Err(Error::PolicyInvalid(format!(
                            "constant dilution {u} outside [0, {}]",
                            params.dilution_max
                        )));
                    }
                }
                Mode::Singular => {
                    if seg.end > params.day_length + TIME_EPS {
                        return Err(Error::PolicyInvalid(
                            "singular segment extends into the dark phase".into(),
                        ));
                    }
                    let us = params.u_sigma().map_err(|_| {
                        Error::PolicyInvalid(
                            "singular mode needs an interior productivity optimum".into(),
                        )
                    })?;
                    if us > params.dilution_max + TIME_EPS {
                        return Err(Error::PolicyInvalid(format!(
                            "singular dilution {us} exceeds the actuator bound {}",
                            params.dilution_max
                        )));
                    }
                }
                _ => {}
            }
        }
        Ok(Self { segments: snapped })
    }

    pub fn all_closed(params: &ReactorParams) -> Self {
        Self {
            segments: vec![Segment {
                start: 0.0,
                end: params.period,
                mode: Mode::Closed,
            }],
        }
    }

    pub fn all_max(params: &ReactorParams) -> Self {
        Self {
            segments: vec![Segment {
                start: 0.0,
                end: params.period,
                mode: Mode::Max,
            }],
        }
    }

    pub fn constant(dilution: f64, params: &ReactorParams) -> Result<Self> {
        Self::new(
            vec![Segment {
                start: 0.0,
                end: params.period,
                mode: Mode::Const(dilution),
            }],
            params,
        )
    }

    /// Closed / Max / Closed with the harvest window `[t_open, t_close)`.
    pub fn bang_bang(t_open: f64, t_close: f64, params: &ReactorParams) -> Result<Self> {
        if !(0.0 < t_open && t_open < t_close && t_close < params.period) {
            return Err(Error::PolicyInvalid(format!(
                "need 0 < t_open < t_close < period, got ({t_open}, {t_close})"
            )));
        }
        Self::new(
            vec![
                Segment {
                    start: 0.0,
                    end: t_open,
                    mode: Mode::Closed,
                },
                Segment {
                    start: t_open,
                    end: t_close,
                    mode: Mode::Max,
                },
                Segment {
                    start: t_close,
                    end: params.period,
                    mode: Mode::Closed,
                },
            ],
            params,
        )
    }

    /// Closed growth, singular hold on `[t_entry, t_exit)`, maximal harvest
    /// until `t_close`, then closed.
    pub fn bang_singular_bang(
        t_entry: f64,
        t_exit: f64,
        t_close: f64,
        params: &ReactorParams,
    ) -> Result<Self> {
        if !(0.0 < t_entry && t_entry < t_exit && t_exit < t_close && t_close < params.period) {
            return Err(Error::PolicyInvalid(format!(
                "need 0 < t_entry < t_exit < t_close < period, got ({t_entry}, {t_exit}, {t_close})"
            )));
        }
        Self::new(
            vec![
                Segment {
                    start: 0.0,
                    end: t_entry,
                    mode: Mode::Closed,
                },
                Segment {
                    start: t_entry,
                    end: t_exit,
                    mode: Mode::Singular,
                },
                Segment {
                    start: t_exit,
                    end: t_close,
                    mode: Mode::Max,
                },
                Segment {
                    start: t_close,
                    end: params.period,
                    mode: Mode::Closed,
                },
            ],
            params,
        )
    }

    /// Maximal dilution on a window centred at dusk sized so the cumulated
    /// flow over the period equals `flow`.
    pub fn harvest_window(flow: f64, params: &ReactorParams) -> Result<Self> {
        if flow < 0.0 {
            return Err(Error::WindowOutOfRange { flow, max: 0.0 });
        }
        if flow == 0.0 {
            return Ok(Self::all_closed(params));
        }
        let half = flow / (2.0 * params.dilution_max);
        let max_flow =
            2.0 * params.dilution_max * params.day_length.min(params.period - params.day_length);
        let (open, close) = (params.day_length - half, params.day_length + half);
        if open < 0.0 || close > params.period {
            return Err(Error::WindowOutOfRange {
                flow,
                max: max_flow,
            });
        }
        Self::bang_bang(open, close, params)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Cumulated flow `∫ u dt` implied by the policy (independent of the state).
    pub fn nominal_flow(&self, params: &ReactorParams) -> f64 {
        self.segments
            .iter()
            .map(|s| s.mode.dilution(params) * (s.end - s.start))
            .sum()
    }

    /// Interior mode-change times (excluding 0 and T): `(t, u_before, u_after)`.
    pub fn switch_times(&self, params: &ReactorParams) -> Vec<(f64, f64, f64)> {
        self.segments
            .windows(2)
            .filter_map(|w| {
                let (a, b) = (w[0], w[1]);
                let (ua, ub) = (a.mode.dilution(params), b.mode.dilution(params));
                (ua != ub).then_some((a.end, ua, ub))
            })
            .collect()
    }
}

/// One recorded point of a trajectory. The dilution `u` is
/// right-continuous: it applies on the step starting at `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub u: f64,
    /// Light indicator `h(t)`: 1.0 in the bright phase, 0.0 at night.
    pub light: f64,
    /// Harvest accumulated on `[0, t]`.
    pub cumulative_yield: f64,
}

/// A sampled state path with its accumulated harvest and flow.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Harvested biomass `∫ u x dt` over the period (g per m^2).
    pub total_yield: f64,
    /// Cumulated flow `∫ u dt` (dimensionless medium renewal).
    pub total_flow: f64,
    pub x0: f64,
    pub policy: ControlPolicy,
    pub step: f64,
}

impl Trajectory {
    pub fn terminal_state(&self) -> f64 {
        self.samples.last().map(|s| s.x).unwrap_or(self.x0)
    }

    /// State at time `t` by linear interpolation between samples.
    pub fn state_at(&self, t: f64) -> f64 {
        let s = &self.samples;
        match s.binary_search_by(|p| p.t.partial_cmp(&t).unwrap()) {
            Ok(i) => s[i].x,
            Err(0) => s[0].x,
            Err(i) if i >= s.len() => s[s.len() - 1].x,
            Err(i) => {
                let (a, b) = (&s[i - 1], &s[i]);
                a.x + (b.x - a.x) * (t - a.t) / (b.t - a.t)
            }
        }
    }
}

/// Terminal data from the sample-free fast integration path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalState {
    pub x: f64,
    pub total_yield: f64,
    pub total_flow: f64,
}

pub(crate) struct Piece {
    pub(crate) start: f64,
    pub(crate) end: f64,
    pub(crate) mode: Mode,
    pub(crate) light: bool,
}

/// Segments split at the day/night breakpoint.
pub(crate) fn pieces(params: &ReactorParams, policy: &ControlPolicy) -> Vec<Piece> {
    let td = params.day_length;
    let mut out = Vec::new();
    for seg in policy.segments() {
        if seg.start < td - TIME_EPS && seg.end > td + TIME_EPS {
            out.push(Piece {
                start: seg.start,
                end: td,
                mode: seg.mode,
                light: true,
            });
            out.push(Piece {
                start: td,
                end: seg.end,
                mode: seg.mode,
                light: false,
            });
        } else {
            out.push(Piece {
                start: seg.start,
                end: seg.end,
                mode: seg.mode,
                light: seg.start < td - TIME_EPS,
            });
        }
    }
    out
}

pub(crate) fn rk4_day_step(model: &GrowthModel, k_loss: f64, x: f64, h: f64) -> (f64, f64) {
    // augmented state (x, ∫ x dt) so harvest shares the state's quadrature order
    let f = |x: f64| model.f_unchecked(x) - k_loss * x;
    let k1 = f(x);
    let k2 = f(x + 0.5 * h * k1);
    let k3 = f(x + 0.5 * h * k2);
    let k4 = f(x + h * k3);
    let x1 = x + 0.5 * h * k1;
    let x2 = x + 0.5 * h * k2;
    let x3 = x + h * k3;
    let x_next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    let area = h / 6.0 * (x + 2.0 * x1 + 2.0 * x2 + x3);
    (x_next, area)
}

fn propagate(
    params: &ReactorParams,
    x0: f64,
    policy: &ControlPolicy,
    step: f64,
    record: Option<&mut Vec<Sample>>,
) -> Result<TerminalState> {
    if !(step > 0.0) {
        return Err(Error::InvalidParams(format!(
            "step must be > 0, got {step}"
        )));
    }
    let end = propagate_pieces(params, x0, &pieces(params, policy), step, record)?;
    Ok(end)
}

/// Same stepping logic as [`propagate`] over an explicit piece list; the
/// solver uses it to integrate structure tails on the grid the final
/// policy integration will use.
pub(crate) fn propagate_pieces(
    params: &ReactorParams,
    x0: f64,
    piece_list: &[Piece],
    step: f64,
    mut record: Option<&mut Vec<Sample>>,
) -> Result<TerminalState> {
    if x0 < 0.0 {
        return Err(Error::NegativeBiomass { x: x0 });
    }
    if let GrowthModel::Logistic(m) = &params.model {
        if x0 > m.domain_max() {
            return Err(Error::DomainExceeded {
                x: x0,
                max: m.domain_max(),
            });
        }
    }

    let mut x = x0;
    let mut harvested = 0.0;
    let mut flow = 0.0;

    for piece in piece_list {
        let u = piece.mode.dilution(params);
        let span = piece.end - piece.start;
        let light = if piece.light { 1.0 } else { 0.0 };
        if let Some(rec) = record.as_deref_mut() {
            rec.push(Sample {
                t: piece.start,
                x,
                u,
                light,
                cumulative_yield: harvested,
            });
        }
        flow += u * span;

        match (piece.mode, piece.light) {
            (Mode::Singular, true) => {
                let x_sigma = params.x_sigma()?;
                if (x - x_sigma).abs() > SINGULAR_TOL * x_sigma.max(1.0) {
                    return Err(Error::PolicyInvalid(format!(
                        "singular segment at t = {} starts with x = {x}, expected {x_sigma}",
                        piece.start
                    )));
                }
                let u_sigma = params.u_sigma()?;
                if let Some(rec) = record.as_deref_mut() {
                    let n = (span / step).ceil().max(1.0) as usize;
                    for i in 1..n {
                        let t = piece.start + span * i as f64 / n as f64;
                        rec.push(Sample {
                            t,
                            x: x_sigma,
                            u: u_sigma,
                            light,
                            cumulative_yield: harvested + u_sigma * x_sigma * (t - piece.start),
                        });
                    }
                }
                x = x_sigma;
                harvested += u_sigma * x_sigma * span;
            }
            (_, false) => {
                // night: linear decay at rate r + u, integrated exactly
                let k = params.respiration + u;
                let x_start = x;
                let yield_to = |dt: f64| {
                    if k > 0.0 {
                        u * x_start * (1.0 - (-k * dt).exp()) / k
                    } else {
                        u * x_start * dt
                    }
                };
                if let Some(rec) = record.as_deref_mut() {
                    let n = (span / step).ceil().max(1.0) as usize;
                    for i in 1..n {
                        let dt = span * i as f64 / n as f64;
                        rec.push(Sample {
                            t: piece.start + dt,
                            x: x_start * (-k * dt).exp(),
                            u,
                            light,
                            cumulative_yield: harvested + yield_to(dt),
                        });
                    }
                }
                harvested += yield_to(span);
                x = x_start * (-k * span).exp();
            }
            (_, true) => {
                let k_loss = params.respiration + u;
                let n = (span / step).ceil().max(1.0) as usize;
                let h = span / n as f64;
                for i in 0..n {
                    let (x_next, area) = rk4_day_step(&params.model, k_loss, x, h);
                    if x_next < -1e-12 {
                        return Err(Error::StateNegative {
                            t: piece.start + h * (i + 1) as f64,
                            x: x_next,
                        });
                    }
                    x = x_next.max(0.0);
                    harvested += u * area;
                    if let Some(rec) = record.as_deref_mut() {
                        if i + 1 < n {
                            rec.push(Sample {
                                t: piece.start + h * (i + 1) as f64,
                                x,
                                u,
                                light,
                                cumulative_yield: harvested,
                            });
                        }
                    }
                }
            }
        }
    }

    if let Some(rec) = record {
        let last = piece_list.last().unwrap();
        rec.push(Sample {
            t: last.end,
            x,
            u: last.mode.dilution(params),
            light: 0.0,
            cumulative_yield: harvested,
        });
    }
    Ok(TerminalState {
        x,
        total_yield: harvested,
        total_flow: flow,
    })
}

/// Integrate one period and record the sampled path.
pub fn integrate(
    params: &ReactorParams,
    x0: f64,
    policy: &ControlPolicy,
    step: f64,
) -> Result<Trajectory> {
    let mut samples = Vec::with_capacity((params.period / step) as usize + 8);
    let end = propagate(params, x0, policy, step, Some(&mut samples))?;
    Ok(Trajectory {
        samples,
        total_yield: end.total_yield,
        total_flow: end.total_flow,
        x0,
        policy: policy.clone(),
        step,
    })
}

/// Terminal state / harvest / flow without sample recording.
pub fn integrate_terminal(
    params: &ReactorParams,
    x0: f64,
    policy: &ControlPolicy,
    step: f64,
) -> Result<TerminalState> {
    propagate(params, x0, policy, step, None)
}

/// One-period map `x(0) -> x(T)` under the policy.
pub fn poincare_map(
    params: &ReactorParams,
    x0: f64,
    policy: &ControlPolicy,
    step: f64,
) -> Result<f64> {
    Ok(integrate_terminal(params, x0, policy, step)?.x)
}

/// One-period map together with its derivative in the initial state,
/// via the variational equation `dm/dt = (f'(x)h - r - u) m`.
fn poincare_with_tangent(
    params: &ReactorParams,
    x0: f64,
    policy: &ControlPolicy,
    step: f64,
) -> Result<(f64, f64)> {
    if x0 < 0.0 {
        return Err(Error::NegativeBiomass { x: x0 });
    }
    let mut x = x0;
    let mut m = 1.0;
    for piece in pieces(params, policy) {
        let u = piece.mode.dilution(params);
        let span = piece.end - piece.start;
        match (piece.mode, piece.light) {
            (Mode::Singular, true) => {
                // the arc pins the state; dependence on x0 is erased
                x = params.x_sigma()?;
                m = 0.0;
            }
            (_, false) => {
                let decay = (-(params.respiration + u) * span).exp();
                x *= decay;
                m *= decay;
            }
            (_, true) => {
                let loss = params.respiration + u;
                let n = (span / step).ceil().max(1.0) as usize;
                let h = span / n as f64;
                for _ in 0..n {
                    let rhs = |x: f64, m: f64| {
                        let (f, fp) = params.model.f_both_unchecked(x);
                        (f - loss * x, (fp - loss) * m)
                    };
                    let (k1x, k1m) = rhs(x, m);
                    let (k2x, k2m) = rhs(x + 0.5 * h * k1x, m + 0.5 * h * k1m);
                    let (k3x, k3m) = rhs(x + 0.5 * h * k2x, m + 0.5 * h * k2m);
                    let (k4x, k4m) = rhs(x + h * k3x, m + h * k3m);
                    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
                    m += h / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
                }
                x = x.max(0.0);
            }
        }
    }
    Ok((x, m))
}

/// Positive fixed point of the one-period map over
/// `(0, closed-reactor equilibrium]`.
///
/// The map is concave and increasing with a fixed point at 0, so the
/// positive fixed point is unique and exists exactly when the map exceeds
/// the identity near the origin. The root of `x(T; x0) - x0` is resolved
/// by Newton steps on the variational derivative, guarded by bisection
/// inside the sign-change bracket.
pub fn periodic_state(params: &ReactorParams, policy: &ControlPolicy, step: f64) -> Result<f64> {
    let gap = |x0: f64| -> Result<(f64, f64)> {
        let (xt, m) = poincare_with_tangent(params, x0, policy, step)?;
        Ok((xt - x0, m - 1.0))
    };

    let xbar0 = params.closed_equilibrium();
    if xbar0 == 0.0 {
        return Err(Error::NoPositiveFixedPoint);
    }
    let mut hi = if xbar0.is_finite() {
        xbar0
    } else {
        params.model.state_bound(params.respiration)
    };
    let mut lo = 1e-9 * hi;
    let (g_lo, _) = gap(lo)?;
    if g_lo <= 0.0 {
        return Err(Error::NoPositiveFixedPoint);
    }
    let (mut g_hi, _) = gap(hi)?;
    let mut expansions = 0;
    while g_hi > 0.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 40 {
            return Err(Error::NoPositiveFixedPoint);
        }
        if let GrowthModel::Logistic(m) = &params.model {
            if hi > m.domain_max() {
                hi = m.domain_max();
                g_hi = gap(hi)?.0;
                if g_hi > 0.0 {
                    return Err(Error::NoPositiveFixedPoint);
                }
                break;
            }
        }
        g_hi = gap(hi)?.0;
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..crate::numeric::ROOT_MAX_ITER {
        let (g, gp) = gap(x)?;
        if g.abs() <= 1e-11 * x.abs().max(1.0) {
            return Ok(x);
        }
        if g > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= crate::numeric::ROOT_ABS_TOL + crate::numeric::ROOT_REL_TOL * x.abs() {
            return Ok(0.5 * (lo + hi));
        }
        let newton = x - g / gp;
        x = if gp != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(0.5 * (lo + hi))
}

/// Admissible initial-condition interval `[x0_min, x0_max]` for periodic
/// operation: `x0_max` is the closed-reactor fixed point; `x0_min` exists
/// only when permanent maximal dilution still sustains a periodic orbit.
pub fn feasible_interval(params: &ReactorParams, step: f64) -> Result<(Option<f64>, f64)> {
    let rep = params.feasibility();
    if !rep.growth_assumption {
        return Err(Error::AssumptionViolated {
            margin: rep.growth_margin,
        });
    }
    let x0_max = periodic_state(params, &ControlPolicy::all_closed(params), step)?;
    let x0_min = if rep.constant_max_possible {
        Some(periodic_state(
            params,
            &ControlPolicy::all_max(params),
            step,
        )?)
    } else {
        None
    };
    Ok((x0_min, x0_max))
}

#[cfg(test)]
mod tests;

use super::*;
use crate::dynamics::full_model::{full_model_simulate, FullModelParams, FullModelState};
use approx::assert_relative_eq;

const STEP: f64 = 1e-4;

fn galbana() -> ReactorParams {
    ReactorParams::isochrysis_galbana()
}

fn galbana_with_r(r: f64) -> ReactorParams {
    ReactorParams {
        respiration: r,
        ..galbana()
    }
}

#[test]
fn params_validation() {
    let m = crate::growth::BeerLambertMonod::isochrysis_galbana().into();
    assert!(ReactorParams::new(m, 0.07, 1.0, 1.5, 2.0).is_err());
    assert!(ReactorParams::new(m, -0.1, 1.0, 0.5, 2.0).is_err());
    assert!(ReactorParams::new(m, 0.07, 1.0, 0.5, 0.0).is_err());
}

#[test]
fn policy_partition_enforced() {
    let p = galbana();
    let gap = vec![
        Segment {
            start: 0.0,
            end: 0.4,
            mode: Mode::Closed,
        },
        Segment {
            start: 0.5,
            end: 1.0,
            mode: Mode::Closed,
        },
    ];
    assert!(matches!(
        ControlPolicy::new(gap, &p),
        Err(Error::PolicyInvalid(_))
    ));
    let short = vec![Segment {
        start: 0.0,
        end: 0.8,
        mode: Mode::Closed,
    }];
    assert!(ControlPolicy::new(short, &p).is_err());
    let reversed = vec![
        Segment {
            start: 0.0,
            end: 0.6,
            mode: Mode::Closed,
        },
        Segment {
            start: 0.6,
            end: 0.4,
            mode: Mode::Max,
        },
        Segment {
            start: 0.4,
            end: 1.0,
            mode: Mode::Closed,
        },
    ];
    assert!(ControlPolicy::new(reversed, &p).is_err());
}

#[test]
fn policy_rejects_singular_in_dark() {
    let p = galbana();
    let segs = vec![
        Segment {
            start: 0.0,
            end: 0.6,
            mode: Mode::Closed,
        },
        Segment {
            start: 0.6,
            end: 0.7,
            mode: Mode::Singular,
        },
        Segment {
            start: 0.7,
            end: 1.0,
            mode: Mode::Closed,
        },
    ];
    assert!(matches!(
        ControlPolicy::new(segs, &p),
        Err(Error::PolicyInvalid(_))
    ));
}

#[test]
fn policy_rejects_singular_above_actuator_bound() {
    // u_sigma = 0.9066 > 0.8
    let p = ReactorParams {
        dilution_max: 0.8,
        ..galbana()
    };
    let segs = vec![
        Segment {
            start: 0.0,
            end: 0.3,
            mode: Mode::Singular,
        },
        Segment {
            start: 0.3,
            end: 1.0,
            mode: Mode::Closed,
        },
    ];
    assert!(ControlPolicy::new(segs, &p).is_err());
}

#[test]
fn policy_rejects_out_of_bound_constant() {
    let p = galbana();
    assert!(ControlPolicy::constant(2.5, &p).is_err());
    assert!(ControlPolicy::constant(-0.1, &p).is_err());
    assert!(ControlPolicy::constant(1.3, &p).is_ok());
}

#[test]
fn harvest_window_flow_and_range() {
    let p = galbana();
    let w = ControlPolicy::harvest_window(0.453, &p).unwrap();
    assert_relative_eq!(w.nominal_flow(&p), 0.453, max_relative = 1e-12);
    // centred at dusk
    let seg = w.segments()[1];
    assert_relative_eq!(0.5 * (seg.start + seg.end), 0.5, epsilon = 1e-12);
    // whole period flooded is out of range
    assert!(matches!(
        ControlPolicy::harvest_window(2.5, &p),
        Err(Error::WindowOutOfRange { .. })
    ));
    // zero flow degenerates to the closed policy
    let z = ControlPolicy::harvest_window(0.0, &p).unwrap();
    assert_eq!(z.segments().len(), 1);
}

#[test]
fn night_decay_is_exact() {
    let p = galbana();
    let traj = integrate(&p, 30.0, &ControlPolicy::all_closed(&p), STEP).unwrap();
    let x_dusk = traj.state_at(p.day_length);
    let expected = x_dusk * (-p.respiration * (p.period - p.day_length)).exp();
    assert_relative_eq!(traj.terminal_state(), expected, max_relative = 1e-14);
}

#[test]
fn night_consumes_expected_biomass_fraction() {
    // closed-form 1 - exp(-r*(T - T_day))
    for (r, pct) in [(0.07, 3.44), (0.7, 29.5)] {
        let p = galbana_with_r(r);
        let traj = integrate(&p, 20.0, &ControlPolicy::all_closed(&p), STEP).unwrap();
        let x_dusk = traj.state_at(p.day_length);
        let lost = 100.0 * (x_dusk - traj.terminal_state()) / x_dusk;
        assert!((lost - pct).abs() < 0.05, "r={r}: lost {lost}%");
    }
}

#[test]
fn zero_state_is_invariant() {
    let p = galbana();
    for policy in [
        ControlPolicy::all_closed(&p),
        ControlPolicy::all_max(&p),
        ControlPolicy::bang_bang(0.2, 0.7, &p).unwrap(),
    ] {
        assert_eq!(poincare_map(&p, 0.0, &policy, STEP).unwrap(), 0.0);
    }
}

#[test]
fn poincare_map_is_monotone_in_x0() {
    let p = galbana();
    let policy = ControlPolicy::bang_bang(0.25, 0.6, &p).unwrap();
    let mut prev = -1.0;
    for i in 1..=20 {
        let x0 = 10.0 * i as f64;
        let xt = poincare_map(&p, x0, &policy, 1e-3).unwrap();
        assert!(xt > prev, "map not increasing at x0 = {x0}");
        prev = xt;
    }
}

#[test]
fn closed_reactor_map_decreases_above_equilibrium() {
    let p = galbana();
    let xbar0 = p.closed_equilibrium();
    let xt = poincare_map(&p, xbar0, &ControlPolicy::all_closed(&p), STEP).unwrap();
    assert!(xt < xbar0);
}

#[test]
fn negative_x0_rejected() {
    let p = galbana();
    assert!(matches!(
        integrate(&p, -1.0, &ControlPolicy::all_closed(&p), STEP),
        Err(Error::NegativeBiomass { .. })
    ));
}

#[test]
fn singular_segment_requires_state_on_arc() {
    let p = galbana();
    let policy = ControlPolicy::bang_singular_bang(0.1, 0.3, 0.6, &p).unwrap();
    // x(0.1) from x0 = 1 is nowhere near x_sigma = 14.93
    assert!(matches!(
        integrate(&p, 1.0, &policy, STEP),
        Err(Error::PolicyInvalid(_))
    ));
}

#[test]
fn singular_segment_holds_state_and_harvests_exactly() {
    let p = galbana();
    let x_sigma = p.x_sigma().unwrap();
    let u_sigma = p.u_sigma().unwrap();
    let policy = ControlPolicy::new(
        vec![
            Segment {
                start: 0.0,
                end: 0.3,
                mode: Mode::Singular,
            },
            Segment {
                start: 0.3,
                end: 1.0,
                mode: Mode::Closed,
            },
        ],
        &p,
    )
    .unwrap();
    let traj = integrate(&p, x_sigma, &policy, STEP).unwrap();
    for s in traj.samples.iter().filter(|s| s.t < 0.3) {
        assert_relative_eq!(s.x, x_sigma, max_relative = 1e-12);
    }
    let harvested_on_arc = traj
        .samples
        .iter()
        .rfind(|s| s.t <= 0.3)
        .unwrap()
        .cumulative_yield;
    assert_relative_eq!(
        harvested_on_arc,
        u_sigma * x_sigma * 0.3,
        max_relative = 1e-12
    );
}

/// Independent characterization of the closed-reactor fixed point:
/// the unique `x0` with  ∫_{x0}^{x0 e^{r(T-T_day)}} dξ/(f(ξ)-rξ) = T_day.
fn closed_fixed_point_by_quadrature(p: &ReactorParams) -> f64 {
    let r = p.respiration;
    let blowup = (r * (p.period - p.day_length)).exp();
    let travel_time = |x0: f64| -> f64 {
        let (a, b) = (x0, x0 * blowup);
        let n = 20_000;
        let h = (b - a) / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let xi = a + h * i as f64;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w / (p.model.eval_f(xi).unwrap() - r * xi);
        }
        acc * h / 3.0
    };
    let xbar0 = p.closed_equilibrium();
    crate::numeric::bisect(
        |x0| travel_time(x0) - p.day_length,
        1e-8,
        xbar0 / blowup * 0.999_999,
    )
}

#[test]
fn closed_reactor_fixed_point_by_two_routes() {
    let p = galbana();
    let by_map = periodic_state(&p, &ControlPolicy::all_closed(&p), STEP).unwrap();
    let by_quadrature = closed_fixed_point_by_quadrature(&p);
    assert_relative_eq!(by_map, by_quadrature, max_relative = 1e-8);
    // frozen regression constant (computed by the quadrature oracle)
    assert_relative_eq!(by_map, 103.334_578_747_8, max_relative = 1e-9);
}

#[test]
fn periodic_state_is_a_fixed_point() {
    let p = galbana();
    for policy in [
        ControlPolicy::all_closed(&p),
        ControlPolicy::constant(0.461, &p).unwrap(),
        ControlPolicy::bang_bang(0.25, 0.6, &p).unwrap(),
    ] {
        let x0 = periodic_state(&p, &policy, STEP).unwrap();
        let xt = poincare_map(&p, x0, &policy, STEP).unwrap();
        assert!(
            (xt - x0).abs() <= 1e-9 * x0,
            "residual {} at x0 {}",
            xt - x0,
            x0
        );
    }
}

#[test]
fn permanent_max_dilution_washes_out_galbana() {
    // f'(0)*T_day = 0.8388 < (r + u_max)*T = 2.07: no periodic orbit
    let p = galbana();
    assert!(matches!(
        periodic_state(&p, &ControlPolicy::all_max(&p), STEP),
        Err(Error::NoPositiveFixedPoint)
    ));
}

#[test]
fn best_constant_reference_yield_from_literature() {
    let p = galbana();
    let policy = ControlPolicy::constant(0.461, &p).unwrap();
    let x0 = periodic_state(&p, &policy, STEP).unwrap();
    let traj = integrate(&p, x0, &policy, STEP).unwrap();
    assert!(
        (traj.total_yield - 6.26).abs() < 0.05,
        "yield {}",
        traj.total_yield
    );
    assert_relative_eq!(traj.total_flow, 0.461, max_relative = 1e-12);
}

#[test]
fn feasible_interval_galbana() {
    let p = galbana();
    let (x0_min, x0_max) = feasible_interval(&p, STEP).unwrap();
    assert!(x0_min.is_none()); // u_max = 2 exceeds what a periodic orbit bears
    assert!(x0_max > 0.0);
    assert_relative_eq!(x0_max, 103.334_578_747_8, max_relative = 1e-8);
}

#[test]
fn feasible_interval_with_small_bound_has_lower_end() {
    // f'(0)*T_day = 0.8388 > (r + 0.5)*T = 0.57: all-max orbit exists
    let p = ReactorParams {
        dilution_max: 0.5,
        ..galbana()
    };
    let (x0_min, x0_max) = feasible_interval(&p, STEP).unwrap();
    let x0_min = x0_min.unwrap();
    assert!(0.0 < x0_min && x0_min < x0_max);
}

#[test]
fn feasible_interval_requires_growth_assumption() {
    let p = galbana_with_r(0.9);
    assert!(matches!(
        feasible_interval(&p, STEP),
        Err(Error::AssumptionViolated { .. })
    ));
}

#[test]
fn feasible_interval_shrinks_near_assumption_boundary() {
    // x0_max tends to zero as r approaches f'(0)*T_day/T = 0.8388 from below
    let mut prev = f64::INFINITY;
    for r in [0.7, 0.8, 0.83, 0.838] {
        let p = galbana_with_r(r);
        let (_, x0_max) = feasible_interval(&p, 1e-3).unwrap();
        assert!(x0_max < prev, "x0_max not shrinking at r = {r}");
        prev = x0_max;
    }
    assert!(prev < 0.3, "x0_max = {prev} at the boundary");
}

#[test]
fn state_stays_below_closed_equilibrium() {
    let p = galbana();
    let xbar0 = p.closed_equilibrium();
    let x0_max = periodic_state(&p, &ControlPolicy::all_closed(&p), STEP).unwrap();
    let traj = integrate(&p, x0_max, &ControlPolicy::all_closed(&p), STEP).unwrap();
    for s in &traj.samples {
        assert!(s.x <= xbar0 * (1.0 + 1e-9));
    }
}

#[test]
fn yield_step_halving_is_fourth_order() {
    let p = galbana();
    let policy = ControlPolicy::constant(0.3, &p).unwrap();
    let run = |h: f64| {
        integrate_terminal(&p, 20.0, &policy, h)
            .unwrap()
            .total_yield
    };
    let (j1, j2, j3) = (run(2e-2), run(1e-2), run(5e-3));
    let ratio = (j1 - j2) / (j2 - j3);
    assert!((10.0..24.0).contains(&ratio), "convergence ratio {ratio}");
}

#[test]
fn mass_balance_on_periodic_orbit() {
    // ∫ u x dt = ∫ f(x) h dt - ∫ r x dt when x(T) = x(0)
    let p = galbana();
    for policy in [
        ControlPolicy::constant(0.461, &p).unwrap(),
        ControlPolicy::bang_bang(0.25, 0.6, &p).unwrap(),
    ] {
        let x0 = periodic_state(&p, &policy, STEP).unwrap();
        let traj = integrate(&p, x0, &policy, STEP).unwrap();
        let mut growth = 0.0;
        let mut respired = 0.0;
        for w in traj.samples.windows(2) {
            let dt = w[1].t - w[0].t;
            if dt == 0.0 {
                continue;
            }
            // panels never straddle dusk, so h is constant on each and
            // equals its value at the left endpoint
            let favg = 0.5 * (p.model.eval_f(w[0].x).unwrap() + p.model.eval_f(w[1].x).unwrap());
            growth += favg * w[0].light * dt;
            respired += 0.5 * p.respiration * (w[0].x + w[1].x) * dt;
        }
        let balance = traj.total_yield - (growth - respired);
        assert!(
            balance.abs() <= 1e-6 * traj.total_yield,
            "imbalance {balance} vs yield {}",
            traj.total_yield
        );
    }
}

#[test]
fn switch_times_reports_mode_changes() {
    let p = galbana();
    let policy = ControlPolicy::bang_bang(0.25, 0.6, &p).unwrap();
    let switches = policy.switch_times(&p);
    assert_eq!(switches.len(), 2);
    assert_eq!(switches[0], (0.25, 0.0, 2.0));
    assert_eq!(switches[1], (0.6, 2.0, 0.0));
}

// -------------------------------------------------------------------------
// two-state oracle model
// -------------------------------------------------------------------------

fn full_params(depth: f64) -> FullModelParams {
    FullModelParams {
        substrate_in: 1e4 * 0.1,
        yield_coeff: 0.5,
        substrate_half_sat: 0.1,
        depth,
    }
}

#[test]
fn full_model_is_depth_invariant_in_surfacic_density() {
    let p = galbana();
    let policy = ControlPolicy::constant(0.4, &p).unwrap();
    let shallow = full_model_simulate(
        &p,
        &full_params(0.1),
        FullModelState {
            substrate: 1e3,
            biomass: 50.0,
        },
        &policy,
        1e-3,
    )
    .unwrap();
    let deep = full_model_simulate(
        &p,
        &full_params(0.2),
        FullModelState {
            substrate: 1e3,
            biomass: 25.0,
        },
        &policy,
        1e-3,
    )
    .unwrap();
    assert_eq!(shallow.len(), deep.len());
    for (a, b) in shallow.iter().zip(deep.iter()) {
        assert_relative_eq!(a.surfacic, b.surfacic, max_relative = 1e-4);
    }
}

#[test]
fn full_model_matches_reduced_model_at_high_substrate() {
    let p = galbana();
    let policy = ControlPolicy::bang_bang(0.25, 0.6, &p).unwrap();
    let x0 = 5.0;
    let full = full_model_simulate(
        &p,
        &full_params(0.1),
        FullModelState {
            substrate: 1e3,
            biomass: x0 / 0.1,
        },
        &policy,
        1e-3,
    )
    .unwrap();
    let reduced = integrate(&p, x0, &policy, 1e-3).unwrap();
    for fs in full.iter().step_by(97) {
        let xr = reduced.state_at(fs.t);
        assert_relative_eq!(fs.surfacic, xr, max_relative = 1e-3);
    }
}

#[test]
fn full_model_washes_out_without_substrate() {
    let p = galbana();
    let policy = ControlPolicy::constant(2.0, &p).unwrap();
    let fm = FullModelParams {
        substrate_in: 0.0,
        ..full_params(0.1)
    };
    let run = full_model_simulate(
        &p,
        &fm,
        FullModelState {
            substrate: 5.0,
            biomass: 30.0,
        },
        &policy,
        1e-3,
    )
    .unwrap();
    let last = run.last().unwrap();
    assert!(last.substrate < 5.0 * 0.2);
    assert!(last.biomass < 30.0 * 0.2);
}

#[test]
fn full_model_rejects_logistic_growth() {
    let p = ReactorParams::fishing_stock();
    let policy = ControlPolicy::all_closed(&p);
    assert!(full_model_simulate(
        &p,
        &full_params(0.1),
        FullModelState {
            substrate: 1.0,
            biomass: 1.0
        },
        &policy,
        1e-3
    )
    .is_err());
}

mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        // trajectories of a scalar ODE cannot cross
        #[test]
        fn poincare_map_preserves_order(x0a in 0.5f64..150.0, gap in 0.5f64..40.0) {
            let p = galbana();
            let policy = ControlPolicy::bang_bang(0.3, 0.55, &p).unwrap();
            let xa = poincare_map(&p, x0a, &policy, 2e-3).unwrap();
            let xb = poincare_map(&p, x0a + gap, &policy, 2e-3).unwrap();
            prop_assert!(xb > xa);
        }

        // constructor output always partitions [0, T]
        #[test]
        fn constructed_policies_partition_period(
            t_open in 0.01f64..0.49,
            width in 0.02f64..0.5,
        ) {
            let p = galbana();
            let t_close = (t_open + width).min(0.99);
            let policy = ControlPolicy::bang_bang(t_open, t_close, &p).unwrap();
            let segs = policy.segments();
            prop_assert_eq!(segs[0].start, 0.0);
            prop_assert_eq!(segs.last().unwrap().end, p.period);
            for w in segs.windows(2) {
                prop_assert_eq!(w[0].end, w[1].start);
            }
        }
    }
}

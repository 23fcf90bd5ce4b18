//! Two-state substrate/biomass chemostat with depth-averaged light-limited
//! growth, kept as an independent oracle for the reduced surfacic model.
//!
//! States are the substrate concentration `S` and the volumic biomass `X`
//! in a reactor of depth `L`. The surfacic density `x = X*L` of this model
//! is depth-invariant and converges to the reduced dynamics as the inflow
//! substrate grows large.

use crate::dynamics::{pieces, ControlPolicy, Mode, ReactorParams};
use crate::error::{Error, Result};
use crate::growth::GrowthModel;

/// Substrate-side parameters and reactor geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullModelParams {
    /// Inflow substrate concentration (mass/volume).
    pub substrate_in: f64,
    /// Substrate consumed per unit biomass grown.
    pub yield_coeff: f64,
    /// Substrate half-saturation constant.
    pub substrate_half_sat: f64,
    /// Reactor depth (m).
    pub depth: f64,
}

/// Instantaneous state of the two-state model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullModelState {
    pub substrate: f64,
    pub biomass: f64,
}

/// A sampled point of the two-state run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullSample {
    pub t: f64,
    pub substrate: f64,
    pub biomass: f64,
    /// Surfacic density `X * depth`, the quantity the reduced model tracks.
    pub surfacic: f64,
}

/// Depth-averaged light factor `ln((i0+k)/(i0 e^{-z} + k)) / z` with
/// `z = attenuation * X * depth`; tends to `i0/(i0+k)` as `z -> 0`.
fn light_average(i0: f64, k: f64, z: f64) -> f64 {
    if z.abs() < 1e-8 {
        i0 / (i0 + k)
    } else {
        ((i0 + k) / (i0 * (-z).exp() + k)).ln() / z
    }
}

/// Integrate the two-state model over one period under the given policy.
///
/// Requires a Beer-Lambert/Monod growth model; the policy's `Singular`
/// mode is applied as the plain constant `u_sigma` (no state pinning).
pub fn full_model_simulate(
    params: &ReactorParams,
    fm: &FullModelParams,
    state0: FullModelState,
    policy: &ControlPolicy,
    step: f64,
) -> Result<Vec<FullSample>> {
    let bl = match &params.model {
        GrowthModel::BeerLambertMonod(m) => *m,
        GrowthModel::Logistic(_) => {
            return Err(Error::InvalidParams(
                "the two-state model needs a Beer-Lambert/Monod growth law".into(),
            ))
        }
    };
    if state0.substrate < 0.0 || state0.biomass < 0.0 {
        return Err(Error::NegativeBiomass {
            x: state0.substrate.min(state0.biomass),
        });
    }
    if !(step > 0.0) {
        return Err(Error::InvalidParams(format!(
            "step must be > 0, got {step}"
        )));
    }

    let rhs = |s: f64, x: f64, u: f64, light: bool| -> (f64, f64) {
        let growth = if light && x > 0.0 {
            let z = bl.attenuation * x * fm.depth;
            bl.mu_max
                * light_average(bl.incident_light, bl.half_saturation, z)
                * (s / (s + fm.substrate_half_sat))
        } else {
            0.0
        };
        (
            u * (fm.substrate_in - s) - fm.yield_coeff * growth * x,
            growth * x - params.respiration * x - u * x,
        )
    };

    let mut s = state0.substrate;
    let mut x = state0.biomass;
    let mut out = Vec::new();
    out.push(FullSample {
        t: 0.0,
        substrate: s,
        biomass: x,
        surfacic: x * fm.depth,
    });

    for piece in pieces(params, policy) {
        let u = match piece.mode {
            Mode::Singular => params.u_sigma()?,
            m => m.dilution(params),
        };
        let span = piece.end - piece.start;
        let n = (span / step).ceil().max(1.0) as usize;
        let h = span / n as f64;
        for i in 0..n {
            let (k1s, k1x) = rhs(s, x, u, piece.light);
            let (k2s, k2x) = rhs(s + 0.5 * h * k1s, x + 0.5 * h * k1x, u, piece.light);
            let (k3s, k3x) = rhs(s + 0.5 * h * k2s, x + 0.5 * h * k2x, u, piece.light);
            let (k4s, k4x) = rhs(s + h * k3s, x + h * k3x, u, piece.light);
            s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
            x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            s = s.max(0.0);
            if x < -1e-12 {
                return Err(Error::StateNegative {
                    t: piece.start + h * (i + 1) as f64,
                    x,
                });
            }
            x = x.max(0.0);
            out.push(FullSample {
                t: piece.start + h * (i + 1) as f64,
                substrate: s,
                biomass: x,
                surfacic: x * fm.depth,
            });
        }
    }
    Ok(out)
}

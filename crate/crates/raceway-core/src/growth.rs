//! Concave net-photosynthesis laws and their closed-form critical points.
//!
//! Every model exposes a growth flux `f(x)` of the surfacic biomass `x`
//! with `f(0) = 0`, `f'(0) > 0` and `f''(x) < 0`. Those three properties
//! are all the downstream solvers rely on; they imply
//! `f'(0) > f(x)/x > f'(x)` for every `x > 0` and a strictly decreasing
//! per-capita rate `f(x)/x`.

use crate::error::{Error, Result};
use crate::numeric::bisect;

/// Light-limited growth under exponential self-shading.
///
/// `f(x) = (mu_max/attenuation) * ln((i0 + k_i) / (i0*exp(-attenuation*x) + k_i))`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeerLambertMonod {
    /// Maximal specific growth rate (day^-1).
    pub mu_max: f64,
    /// Light attenuation coefficient (m^2 / g).
    pub attenuation: f64,
    /// Incident light intensity during the bright phase (umol quanta m^-2 s^-1).
    pub incident_light: f64,
    /// Light half-saturation constant (same unit as `incident_light`).
    pub half_saturation: f64,
}

impl BeerLambertMonod {
    pub fn new(
        mu_max: f64,
        attenuation: f64,
        incident_light: f64,
        half_saturation: f64,
    ) -> Result<Self> {
        if !(mu_max > 0.0 && attenuation > 0.0 && incident_light > 0.0 && half_saturation > 0.0) {
            return Err(Error::InvalidParams(
                "Beer-Lambert/Monod parameters must all be strictly positive".into(),
            ));
        }
        Ok(Self {
            mu_max,
            attenuation,
            incident_light,
            half_saturation,
        })
    }

    /// Reference parameters for *Isochrysis galbana*.
    pub fn isochrysis_galbana() -> Self {
        Self {
            mu_max: 1.7,
            attenuation: 0.5,
            incident_light: 1500.0,
            half_saturation: 20.0,
        }
    }

    /// Supremum of `f`: `(mu_max/a) * ln((i0 + k_i)/k_i)`.
    pub fn flux_bound(&self) -> f64 {
        self.mu_max / self.attenuation
            * ((self.incident_light + self.half_saturation) / self.half_saturation).ln()
    }

    fn f(&self, x: f64) -> f64 {
        let i = self.incident_light * (-self.attenuation * x).exp();
        self.mu_max / self.attenuation
            * ((self.incident_light + self.half_saturation) / (i + self.half_saturation)).ln()
    }

    fn f_prime(&self, x: f64) -> f64 {
        let i = self.incident_light * (-self.attenuation * x).exp();
        self.mu_max * i / (i + self.half_saturation)
    }

    fn f_second(&self, x: f64) -> f64 {
        let i = self.incident_light * (-self.attenuation * x).exp();
        let d = i + self.half_saturation;
        -self.attenuation * self.mu_max * self.half_saturation * i / (d * d)
    }
}

/// Logistic stock growth with a mortality term folded back in,
/// `f(x) = alpha*x*(1 - x/capacity) + mortality*x`.
///
/// Unbounded above zero intake; only concavity, `f(0) = 0` and `f'(0) > 0`
/// are required downstream. Evaluation is restricted to the interval
/// `[0, capacity*(1 + mortality/alpha)]` on which `f >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticGrowth {
    /// Intrinsic growth rate (time^-1).
    pub alpha: f64,
    /// Carrying capacity (stock units).
    pub capacity: f64,
    /// Mortality rate folded into the growth law (time^-1).
    pub mortality: f64,
}

impl LogisticGrowth {
    pub fn new(alpha: f64, capacity: f64, mortality: f64) -> Result<Self> {
        if !(alpha > 0.0 && capacity > 0.0 && mortality >= 0.0) {
            return Err(Error::InvalidParams(
                "logistic growth needs alpha > 0, capacity > 0, mortality >= 0".into(),
            ));
        }
        Ok(Self {
            alpha,
            capacity,
            mortality,
        })
    }

    /// Largest admissible stock: the positive root of `f`.
    pub fn domain_max(&self) -> f64 {
        self.capacity * (1.0 + self.mortality / self.alpha)
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        let max = self.domain_max();
        if x > max * (1.0 + 1e-9) {
            return Err(Error::DomainExceeded { x, max });
        }
        Ok(())
    }
}

/// A concave growth law behind a uniform evaluation interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthModel {
    BeerLambertMonod(BeerLambertMonod),
    Logistic(LogisticGrowth),
}

impl From<BeerLambertMonod> for GrowthModel {
    fn from(m: BeerLambertMonod) -> Self {
        GrowthModel::BeerLambertMonod(m)
    }
}

impl From<LogisticGrowth> for GrowthModel {
    fn from(m: LogisticGrowth) -> Self {
        GrowthModel::Logistic(m)
    }
}

impl GrowthModel {
    /// Growth flux `f(x)`; exactly zero at `x = 0`.
    pub fn eval_f(&self, x: f64) -> Result<f64> {
        self.reject_negative(x)?;
        if x == 0.0 {
            return Ok(0.0);
        }
        match self {
            GrowthModel::BeerLambertMonod(m) => Ok(m.f(x)),
            GrowthModel::Logistic(m) => {
                m.check_domain(x)?;
                Ok(m.alpha * x * (1.0 - x / m.capacity) + m.mortality * x)
            }
        }
    }

    /// Analytic derivative `f'(x)`, strictly decreasing.
    pub fn eval_f_prime(&self, x: f64) -> Result<f64> {
        self.reject_negative(x)?;
        match self {
            GrowthModel::BeerLambertMonod(m) => Ok(m.f_prime(x)),
            GrowthModel::Logistic(m) => {
                m.check_domain(x)?;
                Ok(m.alpha * (1.0 - 2.0 * x / m.capacity) + m.mortality)
            }
        }
    }

    /// Analytic curvature `f''(x) < 0`.
    pub fn eval_f_second(&self, x: f64) -> Result<f64> {
        self.reject_negative(x)?;
        match self {
            GrowthModel::BeerLambertMonod(m) => Ok(m.f_second(x)),
            GrowthModel::Logistic(m) => {
                m.check_domain(x)?;
                Ok(-2.0 * m.alpha / m.capacity)
            }
        }
    }

    /// Per-capita rate at the origin, `f'(0)`.
    pub fn f_prime_zero(&self) -> f64 {
        match self {
            GrowthModel::BeerLambertMonod(m) => {
                m.mu_max * m.incident_light / (m.incident_light + m.half_saturation)
            }
            GrowthModel::Logistic(m) => m.alpha + m.mortality,
        }
    }

    /// Biomass level maximizing net surfacic productivity `f(x) - r*x`,
    /// i.e. the unique solution of `f'(x) = r`. Closed form for both families.
    pub fn x_sigma(&self, respiration: f64) -> Result<f64> {
        let fp0 = self.f_prime_zero();
        if fp0 <= respiration {
            return Err(Error::NoInteriorOptimum {
                f_prime_zero: fp0,
                r: respiration,
            });
        }
        match self {
            GrowthModel::BeerLambertMonod(m) => Ok((1.0 / m.attenuation)
                * (m.incident_light * (m.mu_max - respiration)
                    / (respiration * m.half_saturation))
                    .ln()),
            GrowthModel::Logistic(m) => {
                Ok(m.capacity * (m.alpha + m.mortality - respiration) / (2.0 * m.alpha))
            }
        }
    }

    /// Same root found by monotone bisection on `f'(x) - r`; retained to
    /// cross-check the closed forms.
    pub fn x_sigma_bisect(&self, respiration: f64) -> Result<f64> {
        let fp0 = self.f_prime_zero();
        if fp0 <= respiration {
            return Err(Error::NoInteriorOptimum {
                f_prime_zero: fp0,
                r: respiration,
            });
        }
        let hi = self.derivative_decay_bound(respiration);
        Ok(bisect(
            |x| self.eval_f_prime(x).unwrap_or(respiration - 1.0) - respiration,
            0.0,
            hi,
        ))
    }

    /// Dilution rate sustaining the productivity optimum:
    /// `u_sigma = f(x_sigma)/x_sigma - r`, positive whenever `x_sigma` exists.
    pub fn u_sigma(&self, respiration: f64) -> Result<f64> {
        let xs = self.x_sigma(respiration)?;
        Ok(self.eval_f(xs)? / xs - respiration)
    }

    /// Positive equilibrium of `f(x) = (r+u)*x`, or `0.0` when dilution
    /// exceeds the per-capita growth at the origin (wash-out).
    pub fn equilibrium(&self, respiration: f64, dilution: f64) -> f64 {
        let rate = respiration + dilution;
        if self.f_prime_zero() <= rate {
            return 0.0;
        }
        match self {
            // alpha*(1 - x/K) + mortality = rate has an explicit root.
            GrowthModel::Logistic(m) => m.capacity * (m.alpha + m.mortality - rate) / m.alpha,
            GrowthModel::BeerLambertMonod(m) => {
                if rate <= 0.0 {
                    return f64::INFINITY;
                }
                // The root is below flux_bound()/rate since f < flux_bound.
                let hi = m.flux_bound() / rate * (1.0 + 1e-9);
                let lo = 1e-12 * hi;
                bisect(|x| m.f(x) - rate * x, lo, hi)
            }
        }
    }

    /// Upper bound for any state the dynamics can reach from the closed-reactor
    /// equilibrium, used to bracket root finds.
    pub fn state_bound(&self, respiration: f64) -> f64 {
        match self {
            GrowthModel::Logistic(m) => m.domain_max(),
            GrowthModel::BeerLambertMonod(m) => {
                if respiration > 0.0 {
                    m.flux_bound() / respiration * (1.0 + 1e-9)
                } else {
                    // No finite equilibrium without respiration; cap generously.
                    1e9
                }
            }
        }
    }

    /// Raw flux formula without domain checks; integrator stages may probe
    /// slightly outside `[0, domain]` and both formulas stay finite there.
    pub(crate) fn f_unchecked(&self, x: f64) -> f64 {
        match self {
            GrowthModel::BeerLambertMonod(m) => m.f(x),
            GrowthModel::Logistic(m) => m.alpha * x * (1.0 - x / m.capacity) + m.mortality * x,
        }
    }

    /// Raw derivative formula without domain checks.
    pub(crate) fn f_prime_unchecked(&self, x: f64) -> f64 {
        match self {
            GrowthModel::BeerLambertMonod(m) => m.f_prime(x),
            GrowthModel::Logistic(m) => m.alpha * (1.0 - 2.0 * x / m.capacity) + m.mortality,
        }
    }

    /// Flux and derivative in one pass; they share the attenuation term.
    pub(crate) fn f_both_unchecked(&self, x: f64) -> (f64, f64) {
        match self {
            GrowthModel::BeerLambertMonod(m) => {
                let i = m.incident_light * (-m.attenuation * x).exp();
                let d = i + m.half_saturation;
                (
                    m.mu_max / m.attenuation * ((m.incident_light + m.half_saturation) / d).ln(),
                    m.mu_max * i / d,
                )
            }
            GrowthModel::Logistic(m) => (
                m.alpha * x * (1.0 - x / m.capacity) + m.mortality * x,
                m.alpha * (1.0 - 2.0 * x / m.capacity) + m.mortality,
            ),
        }
    }

    fn reject_negative(&self, x: f64) -> Result<()> {
        if x < 0.0 || x.is_nan() {
            return Err(Error::NegativeBiomass { x });
        }
        Ok(())
    }

    /// A biomass level safely past `x_sigma`, where `f'` has decayed
    /// below `r/10`; brackets the `f'(x) = r` root from above.
    fn derivative_decay_bound(&self, respiration: f64) -> f64 {
        match self {
            GrowthModel::BeerLambertMonod(m) => {
                let mut hi = 1.0 / m.attenuation;
                while m.f_prime(hi) >= respiration / 10.0 {
                    hi *= 2.0;
                }
                hi
            }
            GrowthModel::Logistic(m) => m.domain_max(),
        }
    }
}

/// Closed-form feasibility gates for a model/reactor pairing.
///
/// `margin` fields are the signed left-minus-right slack of each inequality;
/// positive means satisfied.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    /// Day growth beats whole-period respiration: `f'(0)*T_day > r*T`.
    pub growth_assumption: bool,
    pub growth_margin: f64,
    /// A periodic orbit under permanent maximal dilution exists:
    /// `f'(0)*T_day > (r + u_max)*T`.
    pub constant_max_possible: bool,
    pub constant_max_margin: f64,
    /// Singular control is admissible: `u_sigma < u_max`.
    pub singular_possible: bool,
    /// `u_max - u_sigma`; `None` when no interior optimum exists.
    pub singular_margin: Option<f64>,
    /// Dilution can always dominate growth: `u_max > f'(0) - r`.
    pub large_bound: bool,
    pub large_bound_margin: f64,
}

impl FeasibilityReport {
    pub fn evaluate(
        model: &GrowthModel,
        respiration: f64,
        period: f64,
        day_length: f64,
        dilution_max: f64,
    ) -> Self {
        let fp0 = model.f_prime_zero();
        let growth_margin = fp0 * day_length - respiration * period;
        let constant_max_margin = fp0 * day_length - (respiration + dilution_max) * period;
        let singular_margin = model.u_sigma(respiration).ok().map(|us| dilution_max - us);
        let large_bound_margin = dilution_max - (fp0 - respiration);
        FeasibilityReport {
            growth_assumption: growth_margin > 0.0,
            growth_margin,
            constant_max_possible: constant_max_margin > 0.0,
            constant_max_margin,
            singular_possible: singular_margin.map(|m| m > 0.0).unwrap_or(false),
            singular_margin,
            large_bound: large_bound_margin > 0.0,
            large_bound_margin,
        }
    }
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        // Property 1 for arbitrary Beer-Lambert parameters.
        #[test]
        fn beer_lambert_concavity(
            mu in 0.1f64..5.0,
            a in 0.05f64..2.0,
            i0 in 50.0f64..5000.0,
            ki in 1.0f64..200.0,
            x in 1e-6f64..200.0,
        ) {
            let m: GrowthModel = BeerLambertMonod::new(mu, a, i0, ki).unwrap().into();
            let ratio = m.eval_f(x).unwrap() / x;
            let fp = m.eval_f_prime(x).unwrap();
            prop_assert!(m.f_prime_zero() > ratio);
            prop_assert!(ratio > fp);
            prop_assert!(m.eval_f_second(x).unwrap() < 0.0);
        }

        // x_sigma closed form solves f'(x) = r for both families.
        #[test]
        fn x_sigma_solves_stationarity(
            mu in 0.5f64..4.0,
            r_frac in 0.01f64..0.9,
        ) {
            let m: GrowthModel = BeerLambertMonod::new(mu, 0.5, 1500.0, 20.0).unwrap().into();
            let r = r_frac * m.f_prime_zero();
            let xs = m.x_sigma(r).unwrap();
            prop_assert!((m.eval_f_prime(xs).unwrap() - r).abs() < 1e-9 * r.max(1.0));
        }
    }
}

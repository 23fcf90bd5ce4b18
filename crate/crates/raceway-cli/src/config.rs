//! JSON run configuration: schema, *Isochrysis galbana* defaults,
//! validation, and
//! conversion into core parameter types.

use raceway_core::pmp::PmpTolerances;
use raceway_core::{BeerLambertMonod, GrowthModel, LogisticGrowth, ReactorParams, SolverOptions};
use serde::{Deserialize, Serialize};

use crate::CliError;

fn d_mu_bar() -> f64 {
    1.7
}
fn d_attenuation() -> f64 {
    0.5
}
fn d_incident_light() -> f64 {
    1500.0
}
fn d_half_saturation() -> f64 {
    20.0
}
fn d_alpha() -> f64 {
    6.0
}
fn d_capacity() -> f64 {
    10.0
}
fn d_r_link() -> f64 {
    1.0
}

/// Growth-law section; defaults to the *Isochrysis galbana*
/// Beer-Lambert/Monod values.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    BeerLambertMonod {
        #[serde(default = "d_mu_bar")]
        mu_bar: f64,
        #[serde(default = "d_attenuation")]
        a: f64,
        #[serde(default = "d_incident_light", rename = "I0_bar")]
        i0_bar: f64,
        #[serde(default = "d_half_saturation", rename = "K_I")]
        k_i: f64,
    },
    Logistic {
        #[serde(default = "d_alpha")]
        alpha: f64,
        #[serde(default = "d_capacity", rename = "K")]
        capacity: f64,
        #[serde(default = "d_r_link")]
        r_link: f64,
    },
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::BeerLambertMonod {
            mu_bar: d_mu_bar(),
            a: d_attenuation(),
            i0_bar: d_incident_light(),
            k_i: d_half_saturation(),
        }
    }
}

fn d_respiration() -> f64 {
    0.07
}
fn d_period() -> f64 {
    1.0
}
fn d_day_length() -> f64 {
    0.5
}
fn d_dilution_max() -> f64 {
    2.0
}

/// Reactor forcing and actuator section.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReactorConfig {
    #[serde(default = "d_respiration")]
    pub r: f64,
    #[serde(default = "d_period", rename = "T")]
    pub period: f64,
    #[serde(default = "d_day_length", rename = "T_bar")]
    pub day_length: f64,
    #[serde(default = "d_dilution_max")]
    pub u_max: f64,
}

impl Default for ReactorConfig {
    fn default() -> Self {
        Self {
            r: d_respiration(),
            period: d_period(),
            day_length: d_day_length(),
            u_max: d_dilution_max(),
        }
    }
}

fn d_step() -> f64 {
    1e-4
}
fn d_sweep_step() -> f64 {
    1e-3
}
fn d_grid_per_axis() -> usize {
    8
}
fn d_starts() -> usize {
    4
}
fn d_pattern_min_step() -> f64 {
    1e-5
}
fn d_simplex_tol() -> f64 {
    1e-6
}
fn d_nm_max_iter() -> usize {
    200
}
fn d_switch_lambda_tol() -> f64 {
    1e-3
}
fn d_drift_tol() -> f64 {
    1e-4
}
fn d_singular_state_tol() -> f64 {
    1e-6
}
fn d_adjoint_tol() -> f64 {
    1e-8
}
fn d_bifurcation_resolution() -> usize {
    41
}
fn d_contour_resolution() -> usize {
    61
}

/// Numerics section: step sizes, search budget, verification tolerances
/// and default sweep resolutions.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "d_step")]
    pub step: f64,
    #[serde(default = "d_sweep_step")]
    pub sweep_step: f64,
    #[serde(default = "d_grid_per_axis")]
    pub grid_per_axis: usize,
    #[serde(default = "d_starts")]
    pub starts: usize,
    #[serde(default = "d_pattern_min_step")]
    pub pattern_min_step: f64,
    #[serde(default = "d_simplex_tol")]
    pub simplex_tol: f64,
    #[serde(default = "d_nm_max_iter")]
    pub nm_max_iter: usize,
    #[serde(default = "d_switch_lambda_tol")]
    pub switch_lambda_tol: f64,
    #[serde(default = "d_drift_tol")]
    pub hamiltonian_drift_tol: f64,
    #[serde(default = "d_singular_state_tol")]
    pub singular_state_tol: f64,
    #[serde(default = "d_adjoint_tol")]
    pub adjoint_periodicity_tol: f64,
    #[serde(default = "d_bifurcation_resolution")]
    pub bifurcation_resolution: usize,
    #[serde(default = "d_contour_resolution")]
    pub contour_resolution: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields defaulted")
    }
}

fn d_dir() -> String {
    "out".into()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "d_dir")]
    pub dir: String,
    #[serde(default)]
    pub prefix: Option<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: d_dir(),
            prefix: None,
        }
    }
}

/// Whole run configuration; every section optional, unknown keys rejected.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub reactor: ReactorConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    /// Parse and validate a configuration file.
    pub fn from_path(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match self.model {
            ModelConfig::BeerLambertMonod {
                mu_bar,
                a,
                i0_bar,
                k_i,
            } => {
                for (key, v) in [
                    ("mu_bar", mu_bar),
                    ("a", a),
                    ("I0_bar", i0_bar),
                    ("K_I", k_i),
                ] {
                    if !(v > 0.0) {
                        return Err(CliError::schema(format!(
                            "model.{key}: must be strictly positive, got {v}"
                        )));
                    }
                }
            }
            ModelConfig::Logistic {
                alpha,
                capacity,
                r_link,
            } => {
                if !(alpha > 0.0) {
                    return Err(CliError::schema(format!(
                        "model.alpha: must be strictly positive, got {alpha}"
                    )));
                }
                if !(capacity > 0.0) {
                    return Err(CliError::schema(format!(
                        "model.K: must be strictly positive, got {capacity}"
                    )));
                }
                if r_link < 0.0 {
                    return Err(CliError::schema(format!(
                        "model.r_link: must be non-negative, got {r_link}"
                    )));
                }
            }
        }
        let r = &self.reactor;
        if r.r < 0.0 {
            return Err(CliError::schema(format!(
                "reactor.r: must be non-negative, got {}",
                r.r
            )));
        }
        if !(r.period > 0.0) {
            return Err(CliError::schema(format!(
                "reactor.T: must be strictly positive, got {}",
                r.period
            )));
        }
        if !(r.day_length > 0.0 && r.day_length < r.period) {
            return Err(CliError::schema(format!(
                "reactor.T_bar: must lie strictly inside (0, T), got {} with T = {}",
                r.day_length, r.period
            )));
        }
        if !(r.u_max > 0.0) {
            return Err(CliError::schema(format!(
                "reactor.u_max: must be strictly positive, got {}",
                r.u_max
            )));
        }
        let s = &self.solver;
        for (key, v) in [
            ("step", s.step),
            ("sweep_step", s.sweep_step),
            ("pattern_min_step", s.pattern_min_step),
            ("simplex_tol", s.simplex_tol),
            ("switch_lambda_tol", s.switch_lambda_tol),
            ("hamiltonian_drift_tol", s.hamiltonian_drift_tol),
            ("singular_state_tol", s.singular_state_tol),
            ("adjoint_periodicity_tol", s.adjoint_periodicity_tol),
        ] {
            if !(v > 0.0) {
                return Err(CliError::schema(format!(
                    "solver.{key}: must be strictly positive, got {v}"
                )));
            }
        }
        if s.grid_per_axis < 2 || s.bifurcation_resolution < 2 || s.contour_resolution < 2 {
            return Err(CliError::schema(
                "solver: grid resolutions must be at least 2".into(),
            ));
        }
        Ok(())
    }

    pub fn growth_model(&self) -> Result<GrowthModel, CliError> {
        match self.model {
            ModelConfig::BeerLambertMonod {
                mu_bar,
                a,
                i0_bar,
                k_i,
            } => Ok(BeerLambertMonod::new(mu_bar, a, i0_bar, k_i)
                .map_err(|e| CliError::schema(format!("model: {e}")))?
                .into()),
            ModelConfig::Logistic {
                alpha,
                capacity,
                r_link,
            } => Ok(LogisticGrowth::new(alpha, capacity, r_link)
                .map_err(|e| CliError::schema(format!("model: {e}")))?
                .into()),
        }
    }

    pub fn reactor_params(&self) -> Result<ReactorParams, CliError> {
        ReactorParams::new(
            self.growth_model()?,
            self.reactor.r,
            self.reactor.period,
            self.reactor.day_length,
            self.reactor.u_max,
        )
        .map_err(|e| CliError::schema(format!("reactor: {e}")))
    }

    pub fn pmp_tolerances(&self) -> PmpTolerances {
        PmpTolerances {
            switch_lambda: self.solver.switch_lambda_tol,
            hamiltonian_drift: self.solver.hamiltonian_drift_tol,
            singular_state: self.solver.singular_state_tol,
            adjoint_periodicity: self.solver.adjoint_periodicity_tol,
        }
    }

    /// Full-budget options for `solve`, `constant`, `fishing`, `verify`.
    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            step: self.solver.step,
            grid_per_axis: self.solver.grid_per_axis,
            starts: self.solver.starts,
            pattern_min_step: self.solver.pattern_min_step,
            simplex_tol: self.solver.simplex_tol,
            nm_max_iter: self.solver.nm_max_iter,
            pmp_tolerances: self.pmp_tolerances(),
        }
    }

    /// Reduced per-cell budget for grid sweeps.
    pub fn sweep_options(&self) -> SolverOptions {
        SolverOptions {
            step: self.solver.sweep_step,
            grid_per_axis: 4,
            starts: self.solver.starts.min(4),
            pattern_min_step: self.solver.pattern_min_step.max(1e-4),
            simplex_tol: self.solver.simplex_tol.max(1e-5),
            nm_max_iter: self.solver.nm_max_iter.min(80),
            pmp_tolerances: self.pmp_tolerances(),
        }
    }
}

//! JSON scenario files.
//!
//! ```json
//! {
//!   "system": {"qubit": {"omega": 1.0, "gamma0": 0.01, "beta_f": 1.0}},
//!   "initial_state": {"boltzmann_pure": {"beta": 5.0}},
//!   "grid": {"t0": 0.0, "t_max": 100.0, "dt": 0.01},
//!   "lit": {"qubit": {"alpha_mag": 0.1, "theta0": 0.0, "theta_rate": -1.0}},
//!   "run": {"kind": "flux"},
//!   "output": "out"
//! }
//! ```
//!
//! `system` is either `{"qubit": model}` or `{"strategy": {"label", "H", "L"}}`
//! with matrices written as `{"dim", "re", "im"}` (row-major). `initial_state`
//! is one of `{"pure": {"re", "im"}}`, `{"density": matrix}`,
//! `{"gibbs": {"beta"}}` or `{"boltzmann_pure": {"beta"}}`. `lit` is either
//! `{"qubit": {...}}` or `{"general": {"U", "Gamma", "phi"}}`.

use lindblad_lit::dynamics::{Strategy, TimeGrid};
use lindblad_lit::fig1::Fig1Config;
use lindblad_lit::linalg::{ComplexMatrix, C64};
use lindblad_lit::lit::{ComplexVectorRepr, LITParams, QubitLITParams};
use lindblad_lit::optimizer::{Objective, SearchSpace};
use lindblad_lit::state::{DensityMatrix, PureState};
use lindblad_lit::thermal::{boltzmann_pure_state, gibbs_state, make_qubit_thermal_strategy, QubitThermalModel};
use serde::{Deserialize, Serialize};

pub const DEFAULT_FIG1_STRIDE: usize = 10;
pub const DEFAULT_LIT_CHECK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialStateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<TimeGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lit: Option<LitSpec>,
    pub run: RunSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    Qubit(QubitThermalModel),
    Strategy(Strategy),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Beta {
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialStateSpec {
    Pure(ComplexVectorRepr),
    Density(ComplexMatrix),
    Gibbs(Beta),
    BoltzmannPure(Beta),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LitSpec {
    Qubit(QubitLITParams),
    General(LITParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RunSpec {
    Evolve {},
    Flux {},
    Ergotropy {
        /// Qubit only: tabulate the asymptotic ergotropy over these `|α|`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha_mag: Option<Vec<f64>>,
        #[serde(default)]
        theta: f64,
    },
    Trajectories {
        n: usize,
        seed: u64,
        /// Number of individual trajectories written out in full.
        #[serde(default)]
        records: usize,
    },
    Optimize {
        objective: Objective,
        space: SearchSpace,
    },
    Fig1 {
        #[serde(default)]
        config: Fig1Config,
        #[serde(default = "default_stride")]
        stride: usize,
    },
    LitCheck {
        /// Strategy to compare against; defaults to the system transformed
        /// by `lit` at `t0`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        transformed: Option<Strategy>,
        #[serde(default = "default_tol")]
        tol: f64,
    },
}

fn default_stride() -> usize {
    DEFAULT_FIG1_STRIDE
}

fn default_tol() -> f64 {
    DEFAULT_LIT_CHECK_TOL
}

impl RunSpec {
    /// Subcommand name, matching the `kind` tag.
    pub fn command(&self) -> &'static str {
        match self {
            RunSpec::Evolve {} => "evolve",
            RunSpec::Flux {} => "flux",
            RunSpec::Ergotropy { .. } => "ergotropy",
            RunSpec::Trajectories { .. } => "trajectories",
            RunSpec::Optimize { .. } => "optimize",
            RunSpec::Fig1 { .. } => "fig1",
            RunSpec::LitCheck { .. } => "lit-check",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn at<E: std::fmt::Display>(path: &str) -> impl FnOnce(E) -> ConfigError + '_ {
    move |e| ConfigError(format!("{path}: {e}"))
}

/// Parses and validates a scenario. Messages name the offending path.
pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            ConfigError(e.into_inner().to_string())
        } else {
            ConfigError(format!("{path}: {}", e.into_inner()))
        }
    })?;
    scenario.validate()?;
    Ok(scenario)
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(SystemSpec::Qubit(m)) = &self.system {
            m.validate().map_err(at("system.qubit"))?;
        }
        if let Some(g) = &self.grid {
            g.validate().map_err(at("grid"))?;
        }
        if let Some(LitSpec::Qubit(q)) = &self.lit {
            q.validate().map_err(at("lit.qubit"))?;
        }
        if self.lit.is_some() {
            self.strategy()?;
        }
        match &self.run {
            RunSpec::Fig1 { config, stride } => {
                if self.system.is_some() || self.initial_state.is_some() || self.grid.is_some() || self.lit.is_some() {
                    return Err(ConfigError(
                        "run: fig1 takes its parameters from run.config; remove system, initial_state, grid and lit"
                            .into(),
                    ));
                }
                QubitThermalModel::new(config.omega, config.gamma0, config.beta_f).map_err(at("run.config"))?;
                QubitThermalModel::new(config.omega, config.gamma0, config.beta0).map_err(at("run.config"))?;
                TimeGrid::new(0.0, config.t_max, config.dt).map_err(at("run.config"))?;
                QubitLITParams::new(config.alpha_mag, 0.0, 0.0).map_err(at("run.config"))?;
                if *stride == 0 {
                    return Err(ConfigError("run.stride: must be at least 1".into()));
                }
                return Ok(());
            }
            RunSpec::LitCheck { transformed, tol } => {
                let s = self.strategy()?;
                if !(*tol > 0.0) {
                    return Err(ConfigError("run.tol: must be positive".into()));
                }
                match transformed {
                    Some(t) if t.dim() != s.dim() || t.lindblad_ops().len() != s.lindblad_ops().len() => {
                        return Err(ConfigError(
                            "run.transformed: must have the dimension and channel count of the system".into(),
                        ))
                    }
                    Some(_) => {}
                    None if self.lit.is_none() => {
                        return Err(ConfigError(
                            "run: lit-check needs run.transformed or a lit section".into(),
                        ))
                    }
                    None => {}
                }
                return Ok(());
            }
            RunSpec::Trajectories { n, .. } => {
                if *n == 0 {
                    return Err(ConfigError("run.n: empty ensemble".into()));
                }
            }
            RunSpec::Optimize { objective, space } => {
                self.qubit_model()?;
                space.validate().map_err(at("run.space"))?;
                objective.validate(&self.time_grid()?).map_err(at("run.objective"))?;
            }
            RunSpec::Ergotropy {
                alpha_mag: Some(list),
                theta,
            } => {
                self.qubit_model()?;
                if list.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) || !theta.is_finite() {
                    return Err(ConfigError(
                        "run.alpha_mag: values must be non-negative and finite".into(),
                    ));
                }
                return Ok(());
            }
            _ => {}
        }
        self.strategy()?;
        self.time_grid()?;
        self.initial_density()?;
        Ok(())
    }

    pub fn qubit_model(&self) -> Result<QubitThermalModel, ConfigError> {
        match &self.system {
            Some(SystemSpec::Qubit(m)) => Ok(*m),
            Some(SystemSpec::Strategy(_)) => Err(ConfigError(format!(
                "system: `{}` needs the qubit thermal model",
                self.run.command()
            ))),
            None => Err(ConfigError("system: missing".into())),
        }
    }

    pub fn strategy(&self) -> Result<Strategy, ConfigError> {
        let s = match &self.system {
            Some(SystemSpec::Qubit(m)) => make_qubit_thermal_strategy(m),
            Some(SystemSpec::Strategy(s)) => s.clone(),
            None => return Err(ConfigError("system: missing".into())),
        };
        match &self.lit {
            Some(LitSpec::General(p)) if p.channels() != s.lindblad_ops().len() => Err(ConfigError(format!(
                "lit.general: has {} channels but the system has {}",
                p.channels(),
                s.lindblad_ops().len()
            ))),
            Some(LitSpec::Qubit(_)) if !matches!(self.system, Some(SystemSpec::Qubit(_))) => {
                Err(ConfigError("lit.qubit: needs a qubit system".into()))
            }
            _ => Ok(s),
        }
    }

    pub fn time_grid(&self) -> Result<TimeGrid, ConfigError> {
        self.grid.ok_or_else(|| ConfigError("grid: missing".into()))
    }

    pub fn initial_density(&self) -> Result<DensityMatrix, ConfigError> {
        let s = self.strategy()?;
        let spec = self
            .initial_state
            .as_ref()
            .ok_or_else(|| ConfigError("initial_state: missing".into()))?;
        let rho = match spec {
            InitialStateSpec::Pure(_) | InitialStateSpec::BoltzmannPure(_) => {
                Ok(self.initial_pure()?.expect("vector-valued initial state").projector())
            }
            InitialStateSpec::Density(m) => DensityMatrix::new(m.clone()).map_err(at("initial_state.density")),
            InitialStateSpec::Gibbs(b) => gibbs_state(s.hamiltonian(), b.beta).map_err(at("initial_state.gibbs")),
        }?;
        if rho.dim() != s.dim() {
            return Err(ConfigError(format!(
                "initial_state: dimension {} does not match the system dimension {}",
                rho.dim(),
                s.dim()
            )));
        }
        Ok(rho)
    }

    /// The initial state as a vector when it is given as one.
    pub fn initial_pure(&self) -> Result<Option<PureState>, ConfigError> {
        match &self.initial_state {
            Some(InitialStateSpec::Pure(v)) => {
                if v.re.len() != v.im.len() {
                    return Err(ConfigError(
                        "initial_state.pure: re and im have different lengths".into(),
                    ));
                }
                let amps = v.re.iter().zip(&v.im).map(|(&a, &b)| C64::new(a, b)).collect();
                PureState::new(amps).map(Some).map_err(at("initial_state.pure"))
            }
            Some(InitialStateSpec::BoltzmannPure(b)) => {
                let m = self.qubit_model()?;
                boltzmann_pure_state(&m, b.beta)
                    .map(Some)
                    .map_err(at("initial_state.boltzmann_pure"))
            }
            _ => Ok(None),
        }
    }
}

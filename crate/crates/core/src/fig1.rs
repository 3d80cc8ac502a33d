//! The thermal-qubit relaxation scenario monitored through four strategies:
//! no transformation, a constant phase, and phases rotating with and against
//! the coherence.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, StateSeries, StrategySchedule, TimeGrid};
use crate::error::Result;
use crate::lit::{QubitLITParams, QubitLitSchedule, TransformedSchedule};
use crate::observables::{energy_flux, internal_energy};
use crate::state::trace_distance;
use crate::thermal::{boltzmann_pure_state, make_qubit_thermal_strategy, QubitThermalModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig1Config {
    pub omega: f64,
    pub gamma0: f64,
    /// Inverse temperature of the initial Boltzmann-amplitude pure state.
    pub beta0: f64,
    /// Inverse temperature of the bath.
    pub beta_f: f64,
    pub alpha_mag: f64,
    pub dt: f64,
    pub t_max: f64,
    /// Whether to re-integrate each transformed strategy to confirm that the
    /// state trajectory is shared.
    pub verify_states: bool,
}

impl Default for Fig1Config {
    fn default() -> Self {
        Fig1Config {
            omega: 1.0,
            gamma0: 1e-2,
            beta0: 5.0,
            beta_f: 1.0,
            alpha_mag: 0.1,
            dt: 1e-3 * TAU,
            t_max: 1200.0,
            verify_states: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Curve {
    pub label: &'static str,
    pub params: QubitLITParams,
    pub flux: Vec<f64>,
    pub energy: Vec<f64>,
    /// Largest trace distance between the state integrated under this
    /// strategy and the shared trajectory; `None` if not checked.
    pub max_state_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Data {
    pub model: QubitThermalModel,
    pub states: StateSeries,
    pub curves: Vec<Fig1Curve>,
}

impl Fig1Data {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|(t, _)| *t).collect()
    }

    pub fn curve(&self, label: &str) -> Option<&Fig1Curve> {
        self.curves.iter().find(|c| c.label == label)
    }
}

/// Strategies in plotting order: `none` (α = 0), `constant` (θ̇ = 0),
/// `co_rotating` (θ̇ = −ω, α ρ_ge keeps a fixed phase) and `counter_rotating`
/// (θ̇ = +ω). Each starts with `α ρ_ge(0)` real, the counter-rotating one
/// with the opposite sign.
pub fn fig1_strategies(config: &Fig1Config, coherence_phase: f64) -> Result<Vec<(&'static str, QubitLITParams)>> {
    let aligned = (-coherence_phase).rem_euclid(TAU) + 0.0;
    let w = config.omega;
    Ok(vec![
        ("none", QubitLITParams::new(0.0, 0.0, 0.0)?),
        ("constant", QubitLITParams::new(config.alpha_mag, aligned, 0.0)?),
        ("co_rotating", QubitLITParams::new(config.alpha_mag, aligned, -w)?),
        (
            "counter_rotating",
            QubitLITParams::new(config.alpha_mag, (aligned + PI).rem_euclid(TAU), w)?,
        ),
    ])
}

pub fn run_fig1(config: &Fig1Config) -> Result<Fig1Data> {
    let model = QubitThermalModel::new(config.omega, config.gamma0, config.beta_f)?;
    let grid = TimeGrid::new(0.0, config.t_max, config.dt)?;
    let rho0 = boltzmann_pure_state(
        &QubitThermalModel::new(config.omega, config.gamma0, config.beta0)?,
        config.beta0,
    )?
    .projector();
    let base = make_qubit_thermal_strategy(&model);
    let states = evolve(&base, &rho0, &grid)?;

    let mut curves = Vec::new();
    for (label, params) in fig1_strategies(config, rho0.get(0, 1).arg())? {
        let lit = QubitLitSchedule::new(params, model)?;
        let schedule = TransformedSchedule::new(&base, &lit);
        let mut flux = Vec::with_capacity(states.len());
        let mut energy = Vec::with_capacity(states.len());
        for (t, rho) in &states {
            flux.push(energy_flux(&schedule, rho, *t)?.power);
            energy.push(internal_energy(schedule.strategy_at(*t)?.hamiltonian(), rho)?);
        }
        let max_state_deviation = if config.verify_states {
            let own = evolve(&schedule, &rho0, &grid)?;
            let mut worst: f64 = 0.0;
            for ((_, a), (_, b)) in own.iter().zip(&states) {
                worst = worst.max(trace_distance(a, b)?);
            }
            Some(worst)
        } else {
            None
        };
        curves.push(Fig1Curve {
            label,
            params,
            flux,
            energy,
            max_state_deviation,
        });
    }
    Ok(Fig1Data { model, states, curves })
}

//! Search over the restricted qubit family `α(t) = |α|e^{i(θ₀+θ̇t)}` for
//! strategies that optimize flux, stored energy or ergotropy.
//!
//! The state trajectory does not depend on the strategy, so it is integrated
//! once per scenario and shared by every candidate.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, StateSeries, Strategy, StrategySchedule, TimeGrid};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::lit::{QubitLITParams, QubitLitSchedule, TransformedSchedule};
use crate::observables::{energy_flux, internal_energy, qubit_asymptotic_ergotropy, qubit_flux_coefficient};
use crate::state::DensityMatrix;
use crate::thermal::{make_qubit_thermal_strategy, QubitThermalModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObjectiveKind {
    InstantaneousFlux {
        t: f64,
    },
    IntegratedFlux {
        t0: f64,
        t1: f64,
    },
    FinalInternalEnergy {
        t: f64,
    },
    AsymptoticErgotropy,
    /// `ρ_ee(t)`: identical for every strategy, useful as a control.
    ExcitedPopulation {
        t: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ObjectiveRepr", into = "ObjectiveRepr")]
pub struct Objective {
    pub kind: ObjectiveKind,
    pub sense: Sense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveTag {
    InstantaneousFlux,
    IntegratedFlux,
    FinalInternalEnergy,
    AsymptoticErgotropy,
    ExcitedPopulation,
}

/// Flat wire form: `{"kind": ..., "t"/"t0"/"t1": ..., "sense": ...}`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveRepr {
    pub kind: ObjectiveTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    pub sense: Sense,
}

impl TryFrom<ObjectiveRepr> for Objective {
    type Error = String;
    fn try_from(r: ObjectiveRepr) -> std::result::Result<Self, String> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| format!("objective {:?} needs `{name}`", r.kind));
        let forbid = |v: Option<f64>, name: &str| match v {
            Some(_) => Err(format!("objective {:?} does not take `{name}`", r.kind)),
            None => Ok(()),
        };
        let kind = match r.kind {
            ObjectiveTag::IntegratedFlux => {
                forbid(r.t, "t")?;
                ObjectiveKind::IntegratedFlux {
                    t0: need(r.t0, "t0")?,
                    t1: need(r.t1, "t1")?,
                }
            }
            ObjectiveTag::AsymptoticErgotropy => {
                forbid(r.t, "t")?;
                forbid(r.t0, "t0")?;
                forbid(r.t1, "t1")?;
                ObjectiveKind::AsymptoticErgotropy
            }
            tag => {
                forbid(r.t0, "t0")?;
                forbid(r.t1, "t1")?;
                let t = need(r.t, "t")?;
                match tag {
                    ObjectiveTag::InstantaneousFlux => ObjectiveKind::InstantaneousFlux { t },
                    ObjectiveTag::FinalInternalEnergy => ObjectiveKind::FinalInternalEnergy { t },
                    _ => ObjectiveKind::ExcitedPopulation { t },
                }
            }
        };
        Ok(Objective { kind, sense: r.sense })
    }
}

impl From<Objective> for ObjectiveRepr {
    fn from(o: Objective) -> Self {
        let (kind, t, t0, t1) = match o.kind {
            ObjectiveKind::InstantaneousFlux { t } => (ObjectiveTag::InstantaneousFlux, Some(t), None, None),
            ObjectiveKind::IntegratedFlux { t0, t1 } => (ObjectiveTag::IntegratedFlux, None, Some(t0), Some(t1)),
            ObjectiveKind::FinalInternalEnergy { t } => (ObjectiveTag::FinalInternalEnergy, Some(t), None, None),
            ObjectiveKind::AsymptoticErgotropy => (ObjectiveTag::AsymptoticErgotropy, None, None, None),
            ObjectiveKind::ExcitedPopulation { t } => (ObjectiveTag::ExcitedPopulation, Some(t), None, None),
        };
        ObjectiveRepr {
            kind,
            t,
            t0,
            t1,
            sense: o.sense,
        }
    }
}

impl Objective {
    pub fn new(kind: ObjectiveKind, sense: Sense) -> Self {
        Objective { kind, sense }
    }

    pub fn validate(&self, grid: &TimeGrid) -> Result<()> {
        let on_grid = |name: &str, t: f64| {
            if !t.is_finite() || grid.nearest_index(t).is_none() {
                Err(Error::param(
                    name,
                    format!("{t} is outside [{}, {}]", grid.t0, grid.t_max),
                ))
            } else {
                Ok(())
            }
        };
        match self.kind {
            ObjectiveKind::InstantaneousFlux { t }
            | ObjectiveKind::FinalInternalEnergy { t }
            | ObjectiveKind::ExcitedPopulation { t } => on_grid("t", t),
            ObjectiveKind::IntegratedFlux { t0, t1 } => {
                on_grid("t0", t0)?;
                on_grid("t1", t1)?;
                if !(t1 > t0) {
                    return Err(Error::param("t1", "must exceed t0"));
                }
                Ok(())
            }
            ObjectiveKind::AsymptoticErgotropy => Ok(()),
        }
    }

    /// Whether `a` is strictly better than `b`.
    fn better(&self, a: f64, b: f64) -> bool {
        match self.sense {
            Sense::Maximize => a > b,
            Sense::Minimize => a < b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpace {
    pub alpha_mag: Vec<f64>,
    pub theta0: Vec<f64>,
    pub theta_rate: Vec<f64>,
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        if self.alpha_mag.is_empty() {
            return Err(Error::EmptySearchSpace("alpha_mag"));
        }
        if self.theta0.is_empty() {
            return Err(Error::EmptySearchSpace("theta0"));
        }
        if self.theta_rate.is_empty() {
            return Err(Error::EmptySearchSpace("theta_rate"));
        }
        for &a in &self.alpha_mag {
            if !(a >= 0.0) || !a.is_finite() {
                return Err(Error::param("alpha_mag", "values must be non-negative and finite"));
            }
        }
        if self.theta0.iter().chain(&self.theta_rate).any(|x| !x.is_finite()) {
            return Err(Error::param("theta0", "phases must be finite"));
        }
        Ok(())
    }

    /// Candidates in row-major order over `(alpha_mag, theta_rate, theta0)`.
    pub fn points(&self) -> Vec<QubitLITParams> {
        let mut out = Vec::with_capacity(self.alpha_mag.len() * self.theta0.len() * self.theta_rate.len());
        for &alpha_mag in &self.alpha_mag {
            for &theta_rate in &self.theta_rate {
                for &theta0 in &self.theta0 {
                    out.push(QubitLITParams {
                        alpha_mag,
                        theta0,
                        theta_rate,
                    });
                }
            }
        }
        out
    }
}

/// A model, an initial state and a grid, with `ρ(t)` integrated once.
pub struct ObjectiveContext {
    model: QubitThermalModel,
    base: Strategy,
    grid: TimeGrid,
    states: StateSeries,
}

impl ObjectiveContext {
    pub fn new(model: QubitThermalModel, rho0: &DensityMatrix, grid: TimeGrid) -> Result<Self> {
        model.validate()?;
        let base = make_qubit_thermal_strategy(&model);
        let states = evolve(&base, rho0, &grid)?;
        Ok(ObjectiveContext {
            model,
            base,
            grid,
            states,
        })
    }

    pub fn states(&self) -> &StateSeries {
        &self.states
    }

    pub fn model(&self) -> &QubitThermalModel {
        &self.model
    }

    fn state_near(&self, t: f64) -> Result<(f64, &DensityMatrix)> {
        let k = self
            .grid
            .nearest_index(t)
            .ok_or_else(|| Error::param("t", "outside the time grid"))?;
        let (tk, rho) = &self.states[k];
        Ok((*tk, rho))
    }

    pub fn evaluate(&self, obj: &Objective, q: &QubitLITParams) -> Result<f64> {
        obj.validate(&self.grid)?;
        let lit = QubitLitSchedule::new(*q, self.model)?;
        let schedule = TransformedSchedule::new(&self.base, &lit);
        match obj.kind {
            ObjectiveKind::InstantaneousFlux { t } => {
                let (tk, rho) = self.state_near(t)?;
                Ok(energy_flux(&schedule, rho, tk)?.power)
            }
            ObjectiveKind::IntegratedFlux { t0, t1 } => {
                let i0 = self.grid.nearest_index(t0).expect("validated");
                let i1 = self.grid.nearest_index(t1).expect("validated");
                let powers = self.states[i0..=i1]
                    .iter()
                    .map(|(t, rho)| Ok((*t, energy_flux(&schedule, rho, *t)?.power)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(powers
                    .windows(2)
                    .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
                    .sum())
            }
            ObjectiveKind::FinalInternalEnergy { t } => {
                let (tk, rho) = self.state_near(t)?;
                internal_energy(schedule.strategy_at(tk)?.hamiltonian(), rho)
            }
            // depends on |α(t_max)| = alpha_mag only; using it directly keeps
            // candidates that differ in phase exactly tied
            ObjectiveKind::AsymptoticErgotropy => {
                Ok(qubit_asymptotic_ergotropy(C64::new(q.alpha_mag, 0.0), &self.model))
            }
            ObjectiveKind::ExcitedPopulation { t } => Ok(self.state_near(t)?.1.get(1, 1).re),
        }
    }
}

/// Convenience wrapper that integrates `ρ(t)` and evaluates one candidate.
pub fn evaluate_objective(
    obj: &Objective,
    q: &QubitLITParams,
    m: &QubitThermalModel,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
) -> Result<f64> {
    ObjectiveContext::new(*m, rho0, *grid)?.evaluate(obj, q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchRow {
    pub params: QubitLITParams,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best: QubitLITParams,
    pub best_value: f64,
    pub best_index: usize,
    pub table: Vec<SearchRow>,
}

fn tie_key(q: &QubitLITParams) -> [f64; 3] {
    [q.alpha_mag, q.theta_rate, q.theta0]
}

fn key_less(a: &QubitLITParams, b: &QubitLITParams) -> bool {
    for (x, y) in tie_key(a).iter().zip(tie_key(b)) {
        match x.total_cmp(&y) {
            Ordering::Less => return true,
            Ordering::Greater => return false,
            Ordering::Equal => {}
        }
    }
    false
}

/// Exhaustive search. Equal values are resolved in favour of the smallest
/// `(alpha_mag, theta_rate, theta0)`.
pub fn grid_search_in(ctx: &ObjectiveContext, obj: &Objective, space: &SearchSpace) -> Result<SearchResult> {
    space.validate()?;
    obj.validate(&ctx.grid)?;
    let table = space
        .points()
        .into_par_iter()
        .map(|params| {
            Ok(SearchRow {
                params,
                value: ctx.evaluate(obj, &params)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best_index = 0;
    for (i, row) in table.iter().enumerate().skip(1) {
        let cur = &table[best_index];
        if obj.better(row.value, cur.value) || (row.value == cur.value && key_less(&row.params, &cur.params)) {
            best_index = i;
        }
    }
    Ok(SearchResult {
        best: table[best_index].params,
        best_value: table[best_index].value,
        best_index,
        table,
    })
}

pub fn grid_search(
    obj: &Objective,
    space: &SearchSpace,
    m: &QubitThermalModel,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
) -> Result<SearchResult> {
    space.validate()?;
    let ctx = ObjectiveContext::new(*m, rho0, *grid)?;
    grid_search_in(&ctx, obj, space)
}

/// Coherences smaller than this are treated as absent.
pub const COHERENCE_FLOOR: f64 = 1e-14;

/// The `θ₀ ∈ [0, 2π)` that maximizes the instantaneous flux correction
/// `Re(α(t) c ρ_ge)` with `c = i(ω+θ̇) − (γ₊+γ₋)/2`: the phase of `α(t)`
/// cancels that of `c ρ_ge`. `θ₀ + π` gives the minimum.
pub fn optimal_phase_instantaneous(rho: &DensityMatrix, m: &QubitThermalModel, theta_rate: f64, t: f64) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    let coherence = rho.get(0, 1);
    if coherence.norm() < COHERENCE_FLOOR {
        return Err(Error::NoCoherence);
    }
    let c = qubit_flux_coefficient(&QubitLITParams::new(1.0, 0.0, theta_rate)?, m);
    Ok((-(theta_rate * t + c.arg() + coherence.arg())).rem_euclid(TAU))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMatrix, ONE};
    use crate::observables::delta_flux_qubit;
    use crate::state::PureState;
    use crate::thermal::boltzmann_pure_state;

    fn setup() -> (QubitThermalModel, DensityMatrix, TimeGrid) {
        let m = QubitThermalModel::new(1.0, 0.05, 1.0).unwrap();
        let rho0 = boltzmann_pure_state(&m, 2.0).unwrap().projector();
        (m, rho0, TimeGrid::new(0.0, 20.0, 0.01).unwrap())
    }

    fn phases(n: usize) -> Vec<f64> {
        (0..n).map(|k| TAU * k as f64 / n as f64).collect()
    }

    #[test]
    fn identity_candidate_reproduces_base_flux() {
        let (m, rho0, grid) = setup();
        let ctx = ObjectiveContext::new(m, &rho0, grid).unwrap();
        let obj = Objective::new(ObjectiveKind::IntegratedFlux { t0: 0.0, t1: 20.0 }, Sense::Maximize);
        let lit = ctx
            .evaluate(&obj, &QubitLITParams::new(0.0, 1.3, -0.4).unwrap())
            .unwrap();
        let base = &ctx.base;
        let powers: Vec<f64> = ctx
            .states
            .iter()
            .map(|(t, r)| energy_flux(base, r, *t).unwrap().power)
            .collect();
        let times = grid.times();
        let trap: f64 = (1..powers.len())
            .map(|k| 0.5 * (times[k] - times[k - 1]) * (powers[k] + powers[k - 1]))
            .sum();
        assert_eq!(lit, trap);
        // and the trapezoid tracks the change of internal energy
        let h = m.hamiltonian();
        let de = internal_energy(&h, &ctx.states.last().unwrap().1).unwrap() - internal_energy(&h, &rho0).unwrap();
        assert!((trap - de).abs() <= 1e-6);
    }

    #[test]
    fn diagonal_state_makes_strategy_irrelevant() {
        let m = QubitThermalModel::new(1.0, 0.05, 1.0).unwrap();
        let rho0 = DensityMatrix::new(ComplexMatrix::from_real_rows(&[[0.4, 0.0], [0.0, 0.6]])).unwrap();
        let grid = TimeGrid::new(0.0, 5.0, 0.01).unwrap();
        let space = SearchSpace {
            alpha_mag: vec![0.5],
            theta0: phases(8),
            theta_rate: vec![-1.0, 0.0, 1.0],
        };
        let obj = Objective::new(ObjectiveKind::InstantaneousFlux { t: 2.0 }, Sense::Maximize);
        let r = grid_search(&obj, &space, &m, &rho0, &grid).unwrap();
        let first = r.table[0].value;
        assert!(r.table.iter().all(|row| (row.value - first).abs() <= 1e-12));
    }

    #[test]
    fn state_objectives_are_flat() {
        let (m, rho0, grid) = setup();
        let space = SearchSpace {
            alpha_mag: vec![0.0, 0.3, 1.0],
            theta0: phases(4),
            theta_rate: vec![-1.0, 0.5],
        };
        let obj = Objective::new(ObjectiveKind::ExcitedPopulation { t: 7.0 }, Sense::Maximize);
        let r = grid_search(&obj, &space, &m, &rho0, &grid).unwrap();
        let first = r.table[0].value;
        assert!(r.table.iter().all(|row| (row.value - first).abs() <= 1e-12));
        assert_eq!(r.best_index, 0);
    }

    #[test]
    fn single_point_and_empty_spaces() {
        let (m, rho0, grid) = setup();
        let obj = Objective::new(ObjectiveKind::AsymptoticErgotropy, Sense::Maximize);
        let space = SearchSpace {
            alpha_mag: vec![0.7],
            theta0: vec![0.1],
            theta_rate: vec![0.2],
        };
        let r = grid_search(&obj, &space, &m, &rho0, &grid).unwrap();
        assert_eq!(r.best, QubitLITParams::new(0.7, 0.1, 0.2).unwrap());
        let empty = SearchSpace {
            alpha_mag: vec![],
            ..space
        };
        assert_eq!(
            grid_search(&obj, &empty, &m, &rho0, &grid),
            Err(Error::EmptySearchSpace("alpha_mag"))
        );
    }

    #[test]
    fn asymptotic_ergotropy_increases_with_alpha() {
        let (m, rho0, grid) = setup();
        let ctx = ObjectiveContext::new(m, &rho0, grid).unwrap();
        let obj = Objective::new(ObjectiveKind::AsymptoticErgotropy, Sense::Maximize);
        let values: Vec<f64> = (0..20)
            .map(|k| {
                ctx.evaluate(&obj, &QubitLITParams::new(0.15 * k as f64, 0.3, 0.0).unwrap())
                    .unwrap()
            })
            .collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]));
        let r = grid_search_in(
            &ctx,
            &obj,
            &SearchSpace {
                alpha_mag: vec![0.0, 1.0, 2.0],
                theta0: vec![0.0],
                theta_rate: vec![0.0],
            },
        )
        .unwrap();
        assert_eq!(r.best.alpha_mag, 2.0);
        assert!(r.table.iter().all(|row| r.best_value >= row.value));
    }

    #[test]
    fn ties_prefer_smallest_key() {
        let (m, rho0, grid) = setup();
        let obj = Objective::new(ObjectiveKind::AsymptoticErgotropy, Sense::Maximize);
        let space = SearchSpace {
            alpha_mag: vec![1.0],
            theta0: vec![2.0, 1.0, 3.0],
            theta_rate: vec![0.5, -0.5],
        };
        let r = grid_search(&obj, &space, &m, &rho0, &grid).unwrap();
        assert_eq!(r.best, QubitLITParams::new(1.0, 1.0, -0.5).unwrap());
    }

    #[test]
    fn opposite_phases_give_opposite_flux() {
        let (m, rho0, grid) = setup();
        let ctx = ObjectiveContext::new(m, &rho0, grid).unwrap();
        let obj = Objective::new(ObjectiveKind::InstantaneousFlux { t: 0.0 }, Sense::Maximize);
        let base = ctx
            .evaluate(&obj, &QubitLITParams::new(0.0, 0.0, 0.0).unwrap())
            .unwrap();
        let space = SearchSpace {
            alpha_mag: vec![0.4],
            theta0: phases(64),
            theta_rate: vec![0.0],
        };
        let r = grid_search_in(&ctx, &obj, &space).unwrap();
        let opposite = &r.table[(r.best_index + 32) % 64];
        assert!(((r.best_value - base) + (opposite.value - base)).abs() <= 1e-12);
        assert!(r.best_value > base);
    }

    #[test]
    fn co_rotating_phase_maximizes_stored_energy() {
        let (m, rho0, grid) = setup();
        let ctx = ObjectiveContext::new(m, &rho0, grid).unwrap();
        let obj = Objective::new(ObjectiveKind::FinalInternalEnergy { t: 10.0 }, Sense::Maximize);
        let space = SearchSpace {
            alpha_mag: vec![0.0, 0.3],
            theta0: vec![0.0],
            theta_rate: (-8..=8).map(|k| 0.25 * k as f64).collect(),
        };
        let r = grid_search_in(&ctx, &obj, &space).unwrap();
        assert_eq!(r.best.theta_rate, -1.0);
        let still = r
            .table
            .iter()
            .find(|row| row.params.alpha_mag == 0.3 && row.params.theta_rate == 0.0)
            .unwrap();
        let off = r.table.iter().find(|row| row.params.alpha_mag == 0.0).unwrap();
        assert!(r.best_value > still.value && r.best_value > off.value);
    }

    #[test]
    fn closed_form_phase_matches_scan() {
        let m = QubitThermalModel::new(1.0, 0.1, 1.0).unwrap();
        let rho = PureState::normalize(vec![ONE, C64::new(0.6, 0.0)]).unwrap().projector();
        for (theta_rate, t) in [(0.0, 0.0), (1.0, 2.5), (-0.7, 11.0)] {
            let best = optimal_phase_instantaneous(&rho, &m, theta_rate, t).unwrap();
            let f =
                |th: f64| delta_flux_qubit(&QubitLITParams::new(0.5, th, theta_rate).unwrap(), &m, &rho, t).unwrap();
            let n = 10_000;
            let scan = (0..n)
                .map(|k| TAU * k as f64 / n as f64)
                .max_by(|a, b| f(*a).total_cmp(&f(*b)))
                .unwrap();
            let gap = (best - scan).abs();
            assert!(gap.min(TAU - gap) <= TAU / n as f64);
            assert!(f(best) >= f(scan) - 1e-12);
            let worst = (0..n)
                .map(|k| f(TAU * k as f64 / n as f64))
                .fold(f64::INFINITY, f64::min);
            assert!((f(best + std::f64::consts::PI) - worst).abs() <= 1e-6);
        }
    }

    #[test]
    fn phase_covariance() {
        let m = QubitThermalModel::new(1.0, 0.1, 1.0).unwrap();
        let base = PureState::normalize(vec![ONE, C64::new(0.6, 0.0)]).unwrap();
        let theta = optimal_phase_instantaneous(&base.projector(), &m, 0.3, 1.0).unwrap();
        for chi in [0.4, 2.0, -1.1] {
            // ρ_ge = a_g a_e*, so rotating a_e by e^{-iχ} multiplies ρ_ge by e^{iχ}
            let a = base.amplitudes();
            let rotated = PureState::new(vec![a[0], a[1] * C64::from_polar(1.0, -chi)]).unwrap();
            let shifted = optimal_phase_instantaneous(&rotated.projector(), &m, 0.3, 1.0).unwrap();
            let d = (shifted - (theta - chi)).rem_euclid(TAU);
            assert!(d.min(TAU - d) <= 1e-6);
        }
        assert_eq!(
            optimal_phase_instantaneous(&m.asymptotic_state(), &m, 0.0, 0.0),
            Err(Error::NoCoherence)
        );
    }
}

#[cfg(test)]
mod serde_tests {
    use super::*;

    #[test]
    fn objective_json() {
        let o: Objective =
            serde_json::from_str(r#"{"kind":"integrated_flux","t0":0.0,"t1":2.0,"sense":"minimize"}"#).unwrap();
        assert_eq!(
            o,
            Objective::new(ObjectiveKind::IntegratedFlux { t0: 0.0, t1: 2.0 }, Sense::Minimize)
        );
        let o: Objective = serde_json::from_str(r#"{"kind":"asymptotic_ergotropy","sense":"maximize"}"#).unwrap();
        assert_eq!(o.kind, ObjectiveKind::AsymptoticErgotropy);
        assert!(
            serde_json::from_str::<Objective>(r#"{"kind":"asymptotic_ergotropy","sense":"maximize","x":1}"#).is_err()
        );
        assert!(
            serde_json::from_str::<Objective>(r#"{"kind":"instantaneous_flux","t":1,"tt":1,"sense":"maximize"}"#)
                .is_err()
        );
        assert!(serde_json::from_str::<Objective>(r#"{"kind":"instantaneous_flux","sense":"maximize"}"#).is_err());
        assert!(
            serde_json::from_str::<Objective>(r#"{"kind":"asymptotic_ergotropy","t":1,"sense":"maximize"}"#).is_err()
        );
        let back: Objective = serde_json::from_str(&serde_json::to_string(&o).unwrap()).unwrap();
        assert_eq!(back, o);
    }
}

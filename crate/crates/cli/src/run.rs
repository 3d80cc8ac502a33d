//! Dispatch of a validated scenario to the simulation library.

use std::collections::BTreeMap;
use std::path::Path;

use lindblad_lit::dynamics::{evolve, StrategySchedule, TimeGrid, TRACE_RENORMALIZE_TOL};
use lindblad_lit::fig1::run_fig1;
use lindblad_lit::linalg::C64;
use lindblad_lit::lit::{
    apply_lit, verify_invariance, LitSchedule, QubitLitSchedule, TransformedSchedule, UNITARITY_TOL,
};
use lindblad_lit::observables::{
    delta_flux_general, energy_flux, ergotropy, gap_factor, internal_energy, qubit_asymptotic_ergotropy,
    qubit_transformed_hamiltonian,
};
use lindblad_lit::optimizer::{grid_search, COHERENCE_FLOOR};
use lindblad_lit::state::{HERMITIAN_TOL, NEGATIVITY_TOL, NORM_TOL, TRACE_TOL};
use lindblad_lit::trajectories::{run_ensemble, run_trajectory, trajectory_seed, MAX_RATE_STEP};
use serde_json::{json, Value};

use crate::output::{header, matrix_cells, matrix_columns, num, vector_cells, vector_columns, Manifest, Table};
use crate::scenario::{ConfigError, LitSpec, RunSpec, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    /// Invalid or inconsistent configuration.
    Config(String),
    /// The simulation itself failed.
    Numerical(String),
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "configuration error: {m}"),
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
            RunError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

impl From<lindblad_lit::Error> for RunError {
    fn from(e: lindblad_lit::Error) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub dt: Option<f64>,
}

/// Applies command-line overrides and re-validates.
pub fn apply_overrides(s: &mut Scenario, o: Overrides) -> Result<(), ConfigError> {
    if let Some(dt) = o.dt {
        if let Some(g) = s.grid.as_mut() {
            g.dt = dt;
        }
        if let RunSpec::Fig1 { config, .. } = &mut s.run {
            config.dt = dt;
        }
    }
    if let (Some(seed), RunSpec::Trajectories { seed: s_seed, .. }) = (o.seed, &mut s.run) {
        *s_seed = seed;
    }
    s.validate()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub tables: Vec<Table>,
    pub seeds: Vec<u64>,
    pub summary: BTreeMap<String, Value>,
}

pub fn tolerances() -> BTreeMap<String, f64> {
    [
        ("hermitian", HERMITIAN_TOL),
        ("trace", TRACE_TOL),
        ("negativity", NEGATIVITY_TOL),
        ("norm", NORM_TOL),
        ("trace_renormalize", TRACE_RENORMALIZE_TOL),
        ("unitarity", UNITARITY_TOL),
        ("max_rate_step", MAX_RATE_STEP),
        ("coherence_floor", COHERENCE_FLOOR),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

fn lit_schedule(s: &Scenario) -> Result<Option<Box<dyn LitSchedule>>, RunError> {
    Ok(match &s.lit {
        None => None,
        Some(LitSpec::General(p)) => Some(Box::new(p.clone())),
        Some(LitSpec::Qubit(q)) => Some(Box::new(
            QubitLitSchedule::new(*q, s.qubit_model()?).map_err(|e| RunError::Config(format!("lit.qubit: {e}")))?,
        )),
    })
}

/// Runs a scenario and returns its tables without touching the disk.
pub fn run_scenario(s: &Scenario) -> Result<RunReport, RunError> {
    let mut summary = BTreeMap::new();
    let mut seeds = Vec::new();
    let mut tables = Vec::new();

    if let RunSpec::Fig1 { config, stride } = &s.run {
        let data = run_fig1(config)?;
        let times = data.times();
        let last = times.len() - 1;
        let k = TimeGrid::new(0.0, config.t_max, config.dt)?.nearest_index(1.0 / config.gamma0);
        for c in &data.curves {
            let mut t = Table::new(
                format!("fig1_{}.csv", c.label),
                header(&["t", "flux", "internal_energy"]),
            );
            for i in (0..times.len()).filter(|i| i % stride == 0 || *i == last) {
                t.push(vec![num(times[i]), num(c.flux[i]), num(c.energy[i])]);
            }
            tables.push(t);
            summary.insert(
                c.label.to_string(),
                json!({
                    "alpha_mag": c.params.alpha_mag,
                    "theta0": c.params.theta0,
                    "theta_rate": c.params.theta_rate,
                    "internal_energy_at_inverse_gamma0": k.map(|k| c.energy[k]),
                    "final_internal_energy": c.energy[last],
                    "max_state_deviation": c.max_state_deviation,
                }),
            );
        }
        return Ok(RunReport { tables, seeds, summary });
    }

    let base = s.strategy()?;
    let lit = lit_schedule(s)?;
    let transformed = lit.as_deref().map(|l| TransformedSchedule::new(&base, l));
    let monitored: &dyn StrategySchedule = match &transformed {
        Some(t) => t,
        None => &base,
    };

    match &s.run {
        RunSpec::Evolve {} => {
            let grid = s.time_grid()?;
            let states = evolve(monitored, &s.initial_density()?, &grid)?;
            let d = base.dim();
            let mut cols = vec!["t".to_string()];
            cols.extend(matrix_columns("rho", d));
            cols.push("internal_energy".into());
            let mut t = Table::new("states.csv", cols);
            for (time, rho) in &states {
                let e = internal_energy(monitored.strategy_at(*time)?.hamiltonian(), rho)?;
                let mut row = vec![num(*time)];
                row.extend(matrix_cells(rho.matrix()));
                row.push(num(e));
                t.push(row);
            }
            let (_, last) = states.last().expect("grid has at least two points");
            summary.insert("final_trace".into(), json!(last.matrix().trace().re));
            tables.push(t);
        }
        RunSpec::Flux {} => {
            let grid = s.time_grid()?;
            let states = evolve(&base, &s.initial_density()?, &grid)?;
            let mut t = Table::new(
                "flux.csv",
                header(&[
                    "t",
                    "power",
                    "base_power",
                    "delta_flux",
                    "internal_energy",
                    "base_internal_energy",
                ]),
            );
            let mut largest_gap: f64 = 0.0;
            for (time, rho) in &states {
                let power = energy_flux(monitored, rho, *time)?.power;
                let base_power = energy_flux(&base, rho, *time)?.power;
                let delta = match lit.as_deref() {
                    Some(l) => delta_flux_general(&base, l, rho, *time)?,
                    None => 0.0,
                };
                largest_gap = largest_gap.max((power - base_power - delta).abs());
                let e = internal_energy(monitored.strategy_at(*time)?.hamiltonian(), rho)?;
                let e0 = internal_energy(base.hamiltonian(), rho)?;
                t.push(vec![
                    num(*time),
                    num(power),
                    num(base_power),
                    num(delta),
                    num(e),
                    num(e0),
                ]);
            }
            summary.insert("max_decomposition_residual".into(), json!(largest_gap));
            tables.push(t);
        }
        RunSpec::Ergotropy {
            alpha_mag: Some(list),
            theta,
        } => {
            let m = s.qubit_model()?;
            let rho_as = m.asymptotic_state();
            let mut t = Table::new(
                "ergotropy.csv",
                header(&[
                    "alpha_mag",
                    "theta",
                    "gap_factor",
                    "ergotropy_closed_form",
                    "ergotropy_general",
                ]),
            );
            let mut largest_gap: f64 = 0.0;
            for &a in list {
                let alpha = C64::from_polar(a, *theta);
                let closed = qubit_asymptotic_ergotropy(alpha, &m);
                let general = ergotropy(&qubit_transformed_hamiltonian(alpha, &m), &rho_as)?.value;
                largest_gap = largest_gap.max((closed - general).abs());
                t.push(vec![
                    num(a),
                    num(*theta),
                    num(gap_factor(alpha, m.omega)),
                    num(closed),
                    num(general),
                ]);
            }
            summary.insert("max_closed_form_residual".into(), json!(largest_gap));
            tables.push(t);
        }
        RunSpec::Ergotropy { alpha_mag: None, .. } => {
            let grid = s.time_grid()?;
            let states = evolve(&base, &s.initial_density()?, &grid)?;
            let mut t = Table::new(
                "ergotropy_series.csv",
                header(&["t", "ergotropy", "internal_energy", "passive_energy"]),
            );
            for (time, rho) in &states {
                let r = ergotropy(monitored.strategy_at(*time)?.hamiltonian(), rho)?;
                t.push(vec![
                    num(*time),
                    num(r.value),
                    num(r.internal_energy),
                    num(r.passive_energy),
                ]);
            }
            tables.push(t);
        }
        RunSpec::Trajectories { n, seed, records } => {
            let grid = s.time_grid()?;
            let rho0 = s.initial_density()?;
            seeds.push(*seed);
            let reference = evolve(&base, &rho0, &grid)?;
            let ensemble = run_ensemble(monitored, &rho0, &grid, *n, *seed)?;
            let distances = ensemble.trace_distances(&reference)?;
            let d = base.dim();
            let mut cols = vec!["t".to_string()];
            cols.extend(matrix_columns("rho", d));
            cols.push("trace_distance".into());
            let mut t = Table::new("ensemble.csv", cols);
            for ((time, rho), dist) in ensemble.states.iter().zip(&distances) {
                let mut row = vec![num(*time)];
                row.extend(matrix_cells(rho.matrix()));
                row.push(num(*dist));
                t.push(row);
            }
            tables.push(t);
            summary.insert("trajectories".into(), json!(n));
            summary.insert("jump_counts".into(), json!(ensemble.jump_counts));
            summary.insert(
                "max_trace_distance".into(),
                json!(distances.iter().copied().fold(0.0, f64::max)),
            );

            if *records > 0 {
                let psi0 = s.initial_pure()?.ok_or_else(|| {
                    RunError::Config("run.records: needs a pure or boltzmann_pure initial state".into())
                })?;
                let mut cols = vec!["t".to_string(), "outcome".to_string()];
                cols.extend(vector_columns("psi", d));
                for k in 0..(*records).min(*n) {
                    let r = run_trajectory(monitored, &psi0, &grid, trajectory_seed(*seed, k as u64))?;
                    let mut t = Table::new(format!("trajectory_{k}.csv"), cols.clone());
                    for ((time, psi), outcome) in r.times.iter().zip(&r.states).zip(&r.outcomes) {
                        let mut row = vec![num(*time), outcome.to_string()];
                        row.extend(vector_cells(psi.amplitudes()));
                        t.push(row);
                    }
                    tables.push(t);
                }
            }
        }
        RunSpec::Optimize { objective, space } => {
            let result = grid_search(
                objective,
                space,
                &s.qubit_model()?,
                &s.initial_density()?,
                &s.time_grid()?,
            )?;
            let mut t = Table::new(
                "search.csv",
                header(&["alpha_mag", "theta0", "theta_rate", "objective", "is_best"]),
            );
            for (i, row) in result.table.iter().enumerate() {
                t.push(vec![
                    num(row.params.alpha_mag),
                    num(row.params.theta0),
                    num(row.params.theta_rate),
                    num(row.value),
                    (i == result.best_index).to_string(),
                ]);
            }
            tables.push(t);
            summary.insert("best".into(), json!(result.best));
            summary.insert("best_value".into(), json!(result.best_value));
        }
        RunSpec::LitCheck { transformed, tol } => {
            let other = match (transformed, lit.as_deref()) {
                (Some(t), _) => t.clone(),
                (None, Some(l)) => apply_lit(&base, &l.params_at(s.grid.map_or(0.0, |g| g.t0))?)?,
                (None, None) => unreachable!("validated"),
            };
            let check = verify_invariance(&base, &other, *tol)?;
            let mut t = Table::new("lit_check.csv", header(&["invariant", "max_deviation", "tol"]));
            t.push(vec![check.invariant.to_string(), num(check.max_deviation), num(*tol)]);
            tables.push(t);
            summary.insert("invariant".into(), json!(check.invariant));
            summary.insert("max_deviation".into(), json!(check.max_deviation));
        }
        RunSpec::Fig1 { .. } => unreachable!("handled above"),
    }
    Ok(RunReport { tables, seeds, summary })
}

/// Writes all tables and the manifest into `dir`, creating it if needed.
pub fn write_report(dir: &Path, scenario: &Scenario, report: &RunReport) -> Result<Manifest, RunError> {
    std::fs::create_dir_all(dir)?;
    for t in &report.tables {
        t.write(dir)?;
    }
    let mut recorded = scenario.clone();
    recorded.output = None;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: scenario.run.command().to_string(),
        scenario: recorded,
        seeds: report.seeds.clone(),
        tolerances: tolerances(),
        outputs: report.tables.iter().map(|t| t.name.clone()).collect(),
        summary: report.summary.clone(),
    };
    manifest.write(dir)?;
    Ok(manifest)
}

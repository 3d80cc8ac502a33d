//! Quantum-jump unravelling of the master equation. Each strategy defines a
//! POVM `{J₀, J_μ}` per time step; averaging the conditioned pure states over
//! outcomes recovers `ρ(t)` whichever strategy is used.

use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{StateSeries, Strategy, StrategySchedule, TimeGrid};
use crate::eigen::jacobi;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, I, ZERO};
use crate::state::{DensityMatrix, PureState};

/// Largest accepted `dt·‖Σ L†L‖`.
pub const MAX_RATE_STEP: f64 = 1e-2;
/// Total branch weight below which a state is considered numerically dead.
pub const DEAD_STATE_TOL: f64 = 1e-30;
/// Trajectories summed sequentially before a partial sum is handed back.
const BATCH: usize = 128;
/// Batches reduced per parallel wave; bounds memory for large ensembles.
const WAVE: usize = 16;

/// First-order Kraus operators for one step:
/// `J₀ = 𝟙 − iH dt − (dt/2) Σ L†L`, `J_μ = √dt L_μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    pub j0: ComplexMatrix,
    pub jumps: Vec<ComplexMatrix>,
    pub dt: f64,
}

impl KrausSet {
    pub fn dim(&self) -> usize {
        self.j0.dim()
    }

    /// `‖J₀†J₀ + Σ J_μ†J_μ − 𝟙‖_max`, which is `O(dt²)`.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = &self.j0.dagger() * &self.j0;
        for j in &self.jumps {
            sum = &sum + &(&j.dagger() * j);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim()))
    }

    /// `p_i = ⟨ψ|J_i†J_i|ψ⟩` for `i = 0..=m`, unnormalized.
    pub fn probabilities(&self, psi: &PureState) -> Vec<f64> {
        self.ops()
            .map(|op| op.matvec(psi.amplitudes()).iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    fn ops(&self) -> impl Iterator<Item = &ComplexMatrix> {
        std::iter::once(&self.j0).chain(self.jumps.iter())
    }
}

pub fn kraus_set(s: &Strategy, dt: f64) -> Result<KrausSet> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::param("dt", "must be positive and finite"));
    }
    let rate_op = s.jump_rate_operator();
    let max_rate = jacobi(&rate_op).values.last().copied().unwrap_or(0.0).max(0.0);
    if dt * max_rate > MAX_RATE_STEP {
        return Err(Error::StepTooLarge {
            value: dt * max_rate,
            limit: MAX_RATE_STEP,
        });
    }
    let d = s.dim();
    let j0 = &(&ComplexMatrix::identity(d) - &s.hamiltonian().matrix().scale(I * dt)) - &rate_op.scale_real(dt / 2.0);
    let jumps = s.lindblad_ops().iter().map(|l| l.scale_real(dt.sqrt())).collect();
    Ok(KrausSet { j0, jumps, dt })
}

/// `out = m ψ` without allocation.
fn matvec_into(m: &ComplexMatrix, psi: &[C64], out: &mut [C64]) {
    let d = psi.len();
    let data = m.data();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &data[i * d..(i + 1) * d];
        *o = row.iter().zip(psi).map(|(a, b)| a * b).sum();
    }
}

/// Picks the branch for `draw ∈ [0,1)` and overwrites `psi` with the
/// normalized post-measurement state. `scratch` holds `(m+1)·d` amplitudes.
/// Returns `None` for a dead state.
fn step_in_place(k: &KrausSet, psi: &mut [C64], scratch: &mut [C64], draw: f64) -> Option<usize> {
    let d = psi.len();
    let mut probs = [0.0f64; 16];
    let mut probs_heap;
    let n_ops = k.jumps.len() + 1;
    let probs: &mut [f64] = if n_ops <= probs.len() {
        &mut probs[..n_ops]
    } else {
        probs_heap = vec![0.0; n_ops];
        &mut probs_heap
    };
    for (i, op) in k.ops().enumerate() {
        let out = &mut scratch[i * d..(i + 1) * d];
        matvec_into(op, psi, out);
        probs[i] = out.iter().map(|z| z.norm_sqr()).sum();
    }
    let total: f64 = probs.iter().sum();
    if probs.iter().all(|&p| p < DEAD_STATE_TOL) {
        return None;
    }
    let target = draw * total;
    let mut acc = 0.0;
    let mut chosen = None;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        chosen = Some(i);
        acc += p;
        if target < acc {
            break;
        }
    }
    let i = chosen?;
    let norm = probs[i].sqrt();
    for (a, b) in psi.iter_mut().zip(&scratch[i * d..(i + 1) * d]) {
        *a = b / norm;
    }
    Some(i)
}

/// One measurement step. The outcome is `0` for no jump and `μ ≥ 1` for
/// channel `μ` (one-based).
pub fn trajectory_step(state: &PureState, k: &KrausSet, draw: f64) -> Result<(PureState, usize)> {
    if state.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: state.dim(),
        });
    }
    if !(0.0..1.0).contains(&draw) {
        return Err(Error::param("draw", "must lie in [0, 1)"));
    }
    let mut psi = state.amplitudes().to_vec();
    let mut scratch = vec![ZERO; (k.jumps.len() + 1) * k.dim()];
    let outcome = step_in_place(k, &mut psi, &mut scratch, draw).ok_or(Error::DeadState { t: f64::NAN })?;
    Ok((PureState::from_normalized_unchecked(psi), outcome))
}

/// Kraus sets for every step of a grid; a static schedule needs only one.
enum KrausPlan {
    Static(KrausSet),
    PerStep(Vec<KrausSet>),
}

impl KrausPlan {
    fn new(schedule: &dyn StrategySchedule, grid: &TimeGrid) -> Result<Self> {
        grid.validate()?;
        let h = grid.step();
        if schedule.is_static() {
            return Ok(KrausPlan::Static(kraus_set(&schedule.strategy_at(grid.t0)?, h)?));
        }
        let sets = (0..grid.steps())
            .map(|k| kraus_set(&schedule.strategy_at(grid.time(k))?, h))
            .collect::<Result<Vec<_>>>()?;
        Ok(KrausPlan::PerStep(sets))
    }

    fn at(&self, k: usize) -> &KrausSet {
        match self {
            KrausPlan::Static(s) => s,
            KrausPlan::PerStep(v) => &v[k],
        }
    }

    fn channels(&self) -> usize {
        self.at(0).jumps.len()
    }
}

/// Runs one trajectory, calling `visit(step, t, ψ, outcome)` at every grid
/// time including the initial one (outcome 0). The visitor can stop early.
fn simulate<F>(plan: &KrausPlan, psi0: &[C64], grid: &TimeGrid, rng: &mut ChaCha8Rng, mut visit: F) -> Result<()>
where
    F: FnMut(usize, f64, &[C64], usize) -> ControlFlow<()>,
{
    let d = psi0.len();
    let mut psi = psi0.to_vec();
    let mut scratch = vec![ZERO; (plan.channels() + 1) * d];
    if visit(0, grid.time(0), &psi, 0).is_break() {
        return Ok(());
    }
    for k in 0..grid.steps() {
        let draw: f64 = rng.random();
        let outcome =
            step_in_place(plan.at(k), &mut psi, &mut scratch, draw).ok_or(Error::DeadState { t: grid.time(k) })?;
        if visit(k + 1, grid.time(k + 1), &psi, outcome).is_break() {
            break;
        }
    }
    Ok(())
}

fn check_dim(schedule: &dyn StrategySchedule, d: usize) -> Result<()> {
    if schedule.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: schedule.dim(),
            found: d,
        });
    }
    Ok(())
}

/// PRNG stream of trajectory `k` in an ensemble seeded with `base_seed`.
pub fn trajectory_seed(base_seed: u64, k: u64) -> u64 {
    base_seed ^ k
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<PureState>,
    pub outcomes: Vec<usize>,
    pub seed: u64,
}

pub fn run_trajectory(
    schedule: &dyn StrategySchedule,
    psi0: &PureState,
    grid: &TimeGrid,
    seed: u64,
) -> Result<TrajectoryRecord> {
    check_dim(schedule, psi0.dim())?;
    let plan = KrausPlan::new(schedule, grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.steps() + 1;
    let mut record = TrajectoryRecord {
        times: Vec::with_capacity(n),
        states: Vec::with_capacity(n),
        outcomes: Vec::with_capacity(n),
        seed,
    };
    simulate(&plan, psi0.amplitudes(), grid, &mut rng, |_, t, psi, outcome| {
        record.times.push(t);
        record.states.push(PureState::from_normalized_unchecked(psi.to_vec()));
        record.outcomes.push(outcome);
        ControlFlow::Continue(())
    })?;
    Ok(record)
}

fn mean_state(sum: &[C64], d: usize, n: usize) -> Result<DensityMatrix> {
    let m = ComplexMatrix::new(d, sum.iter().map(|z| z / n as f64).collect())?;
    DensityMatrix::new(m.hermitian_part())
}

/// `ρ̄(t) = (1/N) Σ_k |ψ_k(t)⟩⟨ψ_k(t)|`.
pub fn ensemble_average(records: &[TrajectoryRecord]) -> Result<StateSeries> {
    let first = records.first().ok_or(Error::EmptyEnsemble)?;
    let d = first.states.first().map(PureState::dim).ok_or(Error::GridMismatch)?;
    for r in records {
        if r.times != first.times || r.states.len() != r.times.len() {
            return Err(Error::GridMismatch);
        }
    }
    first
        .times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let mut sum = vec![ZERO; d * d];
            for r in records {
                accumulate_projector(&mut sum, r.states[k].amplitudes());
            }
            Ok((t, mean_state(&sum, d, records.len())?))
        })
        .collect()
}

fn accumulate_projector(sum: &mut [C64], psi: &[C64]) {
    let d = psi.len();
    for i in 0..d {
        for j in 0..d {
            sum[i * d + j] += psi[i] * psi[j].conj();
        }
    }
}

/// Eigen-ensemble of an initial density matrix: pure components and their
/// cumulative weights.
struct InitialEnsemble {
    states: Vec<Vec<C64>>,
    cumulative: Vec<f64>,
}

impl InitialEnsemble {
    fn new(rho0: &DensityMatrix) -> Self {
        let es = jacobi(rho0.matrix());
        let mut states = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for (k, &w) in es.values.iter().enumerate().rev() {
            if w > DEAD_STATE_TOL.sqrt() {
                acc += w;
                states.push(es.vector(k));
                cumulative.push(acc);
            }
        }
        InitialEnsemble { states, cumulative }
    }

    /// Consumes a draw only when the ensemble has more than one member.
    fn sample(&self, rng: &mut ChaCha8Rng) -> &[C64] {
        if self.states.len() == 1 {
            return &self.states[0];
        }
        let total = *self.cumulative.last().expect("non-empty");
        let target = rng.random::<f64>() * total;
        let k = self
            .cumulative
            .iter()
            .position(|&c| target < c)
            .unwrap_or(self.states.len() - 1);
        &self.states[k]
    }
}

/// Streaming ensemble result: the averaged state on the grid and the number
/// of jumps recorded in each channel.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub states: StateSeries,
    pub trajectories: usize,
    pub jump_counts: Vec<u64>,
}

impl EnsembleSummary {
    /// Pointwise trace distance to a reference series on the same grid.
    pub fn trace_distances(&self, reference: &StateSeries) -> Result<Vec<f64>> {
        if reference.len() != self.states.len() {
            return Err(Error::GridMismatch);
        }
        self.states
            .iter()
            .zip(reference)
            .map(|((t, a), (u, b))| {
                if (t - u).abs() > 1e-12 * t.abs().max(1.0) {
                    return Err(Error::GridMismatch);
                }
                crate::state::trace_distance(a, b)
            })
            .collect()
    }
}

struct Partial {
    sum: Vec<C64>,
    jumps: Vec<u64>,
}

/// Averages `n` trajectories without storing them. Trajectory `k` uses the
/// seed `base_seed ⊕ k`; mixed initial states are sampled from their
/// eigen-ensemble. Results do not depend on the number of worker threads.
pub fn run_ensemble(
    schedule: &dyn StrategySchedule,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    n: usize,
    base_seed: u64,
) -> Result<EnsembleSummary> {
    if n == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let d = rho0.dim();
    check_dim(schedule, d)?;
    let plan = KrausPlan::new(schedule, grid)?;
    let initial = InitialEnsemble::new(rho0);
    let points = grid.steps() + 1;
    let channels = plan.channels();

    let run_batch = |b: usize| -> Result<Partial> {
        let mut part = Partial {
            sum: vec![ZERO; points * d * d],
            jumps: vec![0; channels],
        };
        for k in b * BATCH..((b + 1) * BATCH).min(n) {
            let mut rng = ChaCha8Rng::seed_from_u64(trajectory_seed(base_seed, k as u64));
            let psi0 = initial.sample(&mut rng).to_vec();
            simulate(&plan, &psi0, grid, &mut rng, |step, _, psi, outcome| {
                accumulate_projector(&mut part.sum[step * d * d..(step + 1) * d * d], psi);
                if outcome > 0 {
                    part.jumps[outcome - 1] += 1;
                }
                ControlFlow::Continue(())
            })?;
        }
        Ok(part)
    };

    let batches = n.div_ceil(BATCH);
    let mut total = vec![ZERO; points * d * d];
    let mut jump_counts = vec![0u64; channels];
    for wave in (0..batches).step_by(WAVE) {
        let parts: Vec<Result<Partial>> = (wave..(wave + WAVE).min(batches))
            .into_par_iter()
            .map(run_batch)
            .collect();
        for part in parts {
            let part = part?;
            for (a, b) in total.iter_mut().zip(&part.sum) {
                *a += b;
            }
            for (a, b) in jump_counts.iter_mut().zip(&part.jumps) {
                *a += b;
            }
        }
    }

    let states = (0..points)
        .map(|k| Ok((grid.time(k), mean_state(&total[k * d * d..(k + 1) * d * d], d, n)?)))
        .collect::<Result<StateSeries>>()?;
    Ok(EnsembleSummary {
        states,
        trajectories: n,
        jump_counts,
    })
}

/// Time of the first jump (the grid time right after it) for each of `n`
/// trajectories, `None` if none occurred before `t_max`.
pub fn first_jump_times(
    schedule: &dyn StrategySchedule,
    psi0: &PureState,
    grid: &TimeGrid,
    n: usize,
    base_seed: u64,
) -> Result<Vec<Option<f64>>> {
    if n == 0 {
        return Err(Error::EmptyEnsemble);
    }
    check_dim(schedule, psi0.dim())?;
    let plan = KrausPlan::new(schedule, grid)?;
    (0..n)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(trajectory_seed(base_seed, k as u64));
            let mut first = None;
            simulate(&plan, psi0.amplitudes(), grid, &mut rng, |_, t, _, outcome| {
                if outcome > 0 {
                    first = Some(t);
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            })?;
            Ok(first)
        })
        .collect()
}

/// Summary of a Kolmogorov–Smirnov comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub statistic: f64,
    pub samples: usize,
}

/// `sup_t |F_n(t) − F(t)|` for possibly censored samples (`None` counts as
/// beyond every observed time). `cdf` must be nondecreasing.
pub fn ks_statistic(samples: &[Option<f64>], cdf: impl Fn(f64) -> f64) -> KsReport {
    let n = samples.len();
    let mut observed: Vec<f64> = samples.iter().flatten().copied().collect();
    observed.sort_by(|a, b| a.total_cmp(b));
    let mut statistic: f64 = 0.0;
    for (i, &t) in observed.iter().enumerate() {
        let f = cdf(t);
        statistic = statistic.max((f - i as f64 / n as f64).abs());
        statistic = statistic.max(((i + 1) as f64 / n as f64 - f).abs());
    }
    KsReport { statistic, samples: n }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve;
    use crate::linalg::{pauli, ONE};
    use crate::state::HermitianOperator;
    use crate::thermal::{make_qubit_thermal_strategy, QubitThermalModel};

    fn cold_qubit() -> Strategy {
        make_qubit_thermal_strategy(&QubitThermalModel::zero_temperature(1.0, 1.0).unwrap())
    }

    fn excited() -> PureState {
        PureState::new(pauli::excited().to_vec()).unwrap()
    }

    fn ground() -> PureState {
        PureState::new(pauli::ground().to_vec()).unwrap()
    }

    #[test]
    fn trivial_strategy_has_identity_kraus() {
        let s = Strategy::new("free", HermitianOperator::zeros(3), vec![]).unwrap();
        let k = kraus_set(&s, 0.1).unwrap();
        assert_eq!(k.j0, ComplexMatrix::identity(3));
        assert!(k.jumps.is_empty());
    }

    #[test]
    fn rejects_large_steps() {
        let s = cold_qubit();
        assert!(matches!(kraus_set(&s, 0.02), Err(Error::StepTooLarge { .. })));
        assert!(kraus_set(&s, 0.01).is_ok());
        assert!(kraus_set(&s, 0.0).is_err());
    }

    #[test]
    fn completeness_defect_is_second_order() {
        let m = QubitThermalModel::new(1.0, 0.5, 1.0).unwrap();
        let s = make_qubit_thermal_strategy(&m);
        let mut dt = 1e-2 / 2.0;
        let mut prev = kraus_set(&s, dt).unwrap().completeness_defect();
        for _ in 0..4 {
            dt /= 2.0;
            let next = kraus_set(&s, dt).unwrap().completeness_defect();
            assert!(prev / next >= 3.5, "{prev} / {next}");
            let rate = s.jump_rate_operator().max_norm();
            let bound = (2.0 * rate * rate + s.hamiltonian().matrix().max_norm().powi(2)) * dt * dt;
            assert!(next <= bound);
            prev = next;
        }
    }

    #[test]
    fn emission_probability() {
        let m = QubitThermalModel::new(1.0, 0.5, 1.0).unwrap();
        let s = make_qubit_thermal_strategy(&m);
        let dt = 1e-3;
        let p = kraus_set(&s, dt).unwrap().probabilities(&excited());
        assert!((p[2] - m.gamma_minus() * dt).abs() <= 1e-15);
        assert_eq!(p[1], 0.0);
        assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-5);
    }

    #[test]
    fn ground_state_is_dark_at_zero_temperature() {
        let k = kraus_set(&cold_qubit(), 1e-3).unwrap();
        let mut psi = ground();
        for i in 0..1000 {
            let (next, outcome) = trajectory_step(&psi, &k, (i as f64 * 0.618).fract()).unwrap();
            assert_eq!(outcome, 0);
            psi = next;
        }
        assert!((psi.amplitudes()[0].norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn jump_from_excited() {
        let k = kraus_set(&cold_qubit(), 1e-3).unwrap();
        let (post, outcome) = trajectory_step(&excited(), &k, 0.99995).unwrap();
        assert_eq!(outcome, 2);
        assert_eq!(post.amplitudes(), &[ONE, ZERO]);
        let (_, outcome) = trajectory_step(&excited(), &k, 0.5).unwrap();
        assert_eq!(outcome, 0);
        assert!(trajectory_step(&excited(), &k, 1.0).is_err());
    }

    #[test]
    fn dead_state_is_reported() {
        let zero = ComplexMatrix::zeros(2);
        let k = KrausSet {
            j0: zero.clone(),
            jumps: vec![zero],
            dt: 1e-3,
        };
        assert!(matches!(
            trajectory_step(&excited(), &k, 0.3),
            Err(Error::DeadState { .. })
        ));
    }

    #[test]
    fn unitary_trajectory_tracks_closed_form() {
        let omega = 1.0;
        let s = Strategy::new(
            "closed",
            HermitianOperator::new(pauli::sigma_z().scale_real(omega / 2.0)).unwrap(),
            vec![],
        )
        .unwrap();
        let psi0 = PureState::normalize(vec![ONE, ONE]).unwrap();
        let grid = TimeGrid::new(0.0, 5.0, 1e-3).unwrap();
        let r = run_trajectory(&s, &psi0, &grid, 1).unwrap();
        assert!(r.outcomes.iter().all(|&o| o == 0));
        assert_eq!(r.times.len(), r.states.len());
        let t = 5.0;
        let exact = [
            C64::from_polar(0.5f64.sqrt(), omega * t / 2.0),
            C64::from_polar(0.5f64.sqrt(), -omega * t / 2.0),
        ];
        let last = r.states.last().unwrap().amplitudes();
        let overlap: C64 = last.iter().zip(&exact).map(|(a, b)| a.conj() * b).sum();
        assert!(1.0 - overlap.norm() <= 5e-3 * t);
        for psi in &r.states {
            assert!((crate::linalg::vector_norm(psi.amplitudes()) - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn trajectories_are_reproducible() {
        let m = QubitThermalModel::new(1.0, 0.5, 1.0).unwrap();
        let s = make_qubit_thermal_strategy(&m);
        let grid = TimeGrid::new(0.0, 2.0, 1e-3).unwrap();
        let a = run_trajectory(&s, &excited(), &grid, 42).unwrap();
        let b = run_trajectory(&s, &excited(), &grid, 42).unwrap();
        assert_eq!(a, b);
        let c = run_trajectory(&s, &excited(), &grid, 43).unwrap();
        assert_ne!(a.outcomes, c.outcomes);
    }

    #[test]
    fn single_record_average_is_its_projector() {
        let m = QubitThermalModel::new(1.0, 0.5, 1.0).unwrap();
        let s = make_qubit_thermal_strategy(&m);
        let grid = TimeGrid::new(0.0, 0.5, 1e-3).unwrap();
        let r = run_trajectory(&s, &excited(), &grid, 7).unwrap();
        let avg = ensemble_average(std::slice::from_ref(&r)).unwrap();
        for ((_, rho), psi) in avg.iter().zip(&r.states) {
            assert!(rho.matrix().max_abs_diff(psi.projector().matrix()) <= 1e-15);
        }
        assert_eq!(ensemble_average(&[]), Err(Error::EmptyEnsemble));
    }

    #[test]
    fn streaming_ensemble_matches_stored_records() {
        let m = QubitThermalModel::new(1.0, 0.5, 1.0).unwrap();
        let s = make_qubit_thermal_strategy(&m);
        let grid = TimeGrid::new(0.0, 0.3, 1e-3).unwrap();
        let psi0 = PureState::normalize(vec![ONE, C64::new(0.5, 0.5)]).unwrap();
        let n = 300;
        let records: Vec<_> = (0..n)
            .map(|k| run_trajectory(&s, &psi0, &grid, trajectory_seed(9, k as u64)).unwrap())
            .collect();
        let stored = ensemble_average(&records).unwrap();
        let streamed = run_ensemble(&s, &psi0.projector(), &grid, n, 9).unwrap();
        for ((_, a), (_, b)) in stored.iter().zip(&streamed.states) {
            assert!(a.matrix().max_abs_diff(b.matrix()) <= 1e-12);
        }
        let jumps: u64 = records
            .iter()
            .map(|r| r.outcomes.iter().filter(|&&o| o > 0).count() as u64)
            .sum();
        assert_eq!(jumps, streamed.jump_counts.iter().sum::<u64>());
    }

    #[test]
    fn small_ensemble_tracks_master_equation() {
        let m = QubitThermalModel::new(1.0, 0.5, 1.0).unwrap();
        let s = make_qubit_thermal_strategy(&m);
        let grid = TimeGrid::new(0.0, 2.0, 1e-3).unwrap();
        let rho0 = DensityMatrix::new(ComplexMatrix::from_rows(&[
            [C64::new(0.3, 0.0), C64::new(0.2, 0.1)],
            [C64::new(0.2, -0.1), C64::new(0.7, 0.0)],
        ]))
        .unwrap();
        let exact = evolve(&s, &rho0, &grid).unwrap();
        let mc = run_ensemble(&s, &rho0, &grid, 2000, 3).unwrap();
        let worst = mc.trace_distances(&exact).unwrap().into_iter().fold(0.0, f64::max);
        assert!(worst <= 0.06, "{worst}");
        assert_eq!(run_ensemble(&s, &rho0, &grid, 0, 3).unwrap_err(), Error::EmptyEnsemble);
    }

    #[test]
    fn ks_statistic_of_exact_quantiles_is_small() {
        let n = 1000;
        let samples: Vec<Option<f64>> = (0..n)
            .map(|i| Some(-(1.0 - (i as f64 + 0.5) / n as f64).ln()))
            .collect();
        let r = ks_statistic(&samples, |t| 1.0 - (-t).exp());
        assert!(r.statistic <= 0.5 / n as f64 + 1e-12);
        let censored = vec![None; 10];
        assert_eq!(ks_statistic(&censored, |_| 0.0).statistic, 0.0);
    }
}

//! Strategies `{H, L_μ}`, the GKSL generator and its fixed-step integration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, I};
use crate::state::{DensityMatrix, HermitianOperator};

/// Per-step trace drift that is silently renormalized; anything larger is
/// reported as an integration failure.
pub const TRACE_RENORMALIZE_TOL: f64 = 1e-9;

/// Upper bound on the number of steps in a [`TimeGrid`].
pub const MAX_STEPS: f64 = 1e8;

/// One concrete operator set realizing a master equation.
///
/// The order of `lindblad_ops` matters: invariance transformations index it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StrategyRepr", into = "StrategyRepr")]
pub struct Strategy {
    label: String,
    hamiltonian: HermitianOperator,
    lindblad_ops: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyRepr {
    pub label: String,
    #[serde(rename = "H")]
    pub hamiltonian: HermitianOperator,
    #[serde(rename = "L")]
    pub lindblad_ops: Vec<ComplexMatrix>,
}

impl TryFrom<StrategyRepr> for Strategy {
    type Error = Error;
    fn try_from(r: StrategyRepr) -> Result<Self> {
        Strategy::new(r.label, r.hamiltonian, r.lindblad_ops)
    }
}

impl From<Strategy> for StrategyRepr {
    fn from(s: Strategy) -> Self {
        StrategyRepr {
            label: s.label,
            hamiltonian: s.hamiltonian,
            lindblad_ops: s.lindblad_ops,
        }
    }
}

impl Strategy {
    pub fn new(
        label: impl Into<String>,
        hamiltonian: HermitianOperator,
        lindblad_ops: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let d = hamiltonian.dim();
        for l in &lindblad_ops {
            if l.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: l.dim(),
                });
            }
        }
        Ok(Strategy {
            label: label.into(),
            hamiltonian,
            lindblad_ops,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn lindblad_ops(&self) -> &[ComplexMatrix] {
        &self.lindblad_ops
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// `Σ_μ L_μ† L_μ`.
    pub fn jump_rate_operator(&self) -> ComplexMatrix {
        let mut k = ComplexMatrix::zeros(self.dim());
        for l in &self.lindblad_ops {
            k = &k + &(&l.dagger() * l);
        }
        k
    }

    pub fn generator(&self) -> Generator {
        Generator::new(self)
    }
}

/// The GKSL generator with its products precomputed:
/// `dρ/dt = Mρ + ρM† + Σ L ρ L†` with `M = -iH - ½ Σ L†L`.
#[derive(Debug, Clone)]
pub struct Generator {
    drift: ComplexMatrix,
    drift_dag: ComplexMatrix,
    jumps: Vec<(ComplexMatrix, ComplexMatrix)>,
}

impl Generator {
    pub fn new(s: &Strategy) -> Self {
        let k = s.jump_rate_operator();
        let drift = &s.hamiltonian.matrix().scale(-I) - &k.scale_real(0.5);
        Generator {
            drift_dag: drift.dagger(),
            drift,
            jumps: s.lindblad_ops.iter().map(|l| (l.clone(), l.dagger())).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.drift.dim()
    }

    /// Applies the generator to any matrix (not only to states).
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        let mut out = &(&self.drift * rho) + &(rho * &self.drift_dag);
        for (l, ldag) in &self.jumps {
            out = &out + &(&(l * rho) * ldag);
        }
        Ok(out)
    }
}

/// `dρ/dt = -i[H, ρ] + Σ_μ (L_μ ρ L_μ† - ½{L_μ†L_μ, ρ})`.
pub fn generator_apply(s: &Strategy, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    s.generator().apply(rho.matrix())
}

/// Matrix of the generator acting on column-stacked `vec(ρ)`; column
/// `i + j·d` is `vec(G(E_ij))`.
pub fn superoperator_matrix(s: &Strategy) -> ComplexMatrix {
    let d = s.dim();
    let gen = s.generator();
    let n = d * d;
    let mut out = ComplexMatrix::zeros(n);
    for j in 0..d {
        for i in 0..d {
            let col = gen
                .apply(&ComplexMatrix::unit(d, i, j))
                .expect("unit matrix has the strategy dimension")
                .vectorize();
            for (row, z) in col.into_iter().enumerate() {
                out.set(row, i + j * d, z);
            }
        }
    }
    out
}

/// A strategy that may depend on time.
pub trait StrategySchedule: Sync {
    fn dim(&self) -> usize;

    fn strategy_at(&self, t: f64) -> Result<Strategy>;

    /// `∂H/∂t` at `t`, or `None` when the schedule cannot provide it.
    fn hamiltonian_rate(&self, t: f64) -> Result<Option<ComplexMatrix>>;

    /// Static schedules are integrated with a single cached generator.
    fn is_static(&self) -> bool {
        false
    }
}

impl StrategySchedule for Strategy {
    fn dim(&self) -> usize {
        Strategy::dim(self)
    }

    fn strategy_at(&self, _t: f64) -> Result<Strategy> {
        Ok(self.clone())
    }

    fn hamiltonian_rate(&self, _t: f64) -> Result<Option<ComplexMatrix>> {
        Ok(Some(ComplexMatrix::zeros(Strategy::dim(self))))
    }

    fn is_static(&self) -> bool {
        true
    }
}

/// Uniform time grid. The requested `dt` is an upper bound: the step actually
/// used is `(t_max - t0) / n` with the smallest `n` that does not exceed it,
/// so the grid always ends exactly on `t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t0: f64,
    pub t_max: f64,
    pub dt: f64,
}

impl TimeGrid {
    pub fn new(t0: f64, t_max: f64, dt: f64) -> Result<Self> {
        let grid = TimeGrid { t0, t_max, dt };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t_max.is_finite()) || self.t0 >= self.t_max {
            return Err(Error::param("t_max", "must be finite and greater than t0"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::param("dt", "must be positive"));
        }
        if (self.t_max - self.t0) / self.dt > MAX_STEPS {
            return Err(Error::param("dt", "grid would exceed 1e8 steps"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (((self.t_max - self.t0) / self.dt) - 1e-9).ceil().max(1.0) as usize
    }

    pub fn step(&self) -> f64 {
        (self.t_max - self.t0) / self.steps() as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps() {
            self.t_max
        } else {
            self.t0 + k as f64 * self.step()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps()).map(|k| self.time(k)).collect()
    }

    /// Index of the grid point closest to `t`, if `t` lies on the grid span.
    pub fn nearest_index(&self, t: f64) -> Option<usize> {
        let h = self.step();
        if t < self.t0 - 0.5 * h || t > self.t_max + 0.5 * h {
            return None;
        }
        let k = ((t - self.t0) / h).round().clamp(0.0, self.steps() as f64);
        Some(k as usize)
    }
}

pub type StateSeries = Vec<(f64, DensityMatrix)>;

/// Classical fixed-step RK4 integration of the master equation.
///
/// Time-dependent schedules are sampled at the stage times `t`, `t + h/2`,
/// `t + h`. After every step the trace is renormalized if it drifted by at
/// most [`TRACE_RENORMALIZE_TOL`]; larger drift, or a result that is no
/// longer a valid density matrix, is an error.
pub fn evolve(schedule: &dyn StrategySchedule, rho0: &DensityMatrix, grid: &TimeGrid) -> Result<StateSeries> {
    grid.validate()?;
    if rho0.dim() != schedule.dim() {
        return Err(Error::DimensionMismatch {
            expected: schedule.dim(),
            found: rho0.dim(),
        });
    }
    let n = grid.steps();
    let h = grid.step();
    let mut out = Vec::with_capacity(n + 1);
    out.push((grid.t0, rho0.clone()));

    let static_gen = if schedule.is_static() {
        Some(schedule.strategy_at(grid.t0)?.generator())
    } else {
        None
    };
    let gen_at = |t: f64| -> Result<Generator> {
        match &static_gen {
            Some(g) => Ok(g.clone()),
            None => Ok(schedule.strategy_at(t)?.generator()),
        }
    };

    let mut rho = rho0.matrix().clone();
    let mut gen_start = gen_at(grid.t0)?;
    for k in 0..n {
        let t = grid.time(k);
        let t_next = grid.time(k + 1);
        let gen_mid = gen_at(t + 0.5 * h)?;
        let gen_end = gen_at(t_next)?;

        let k1 = gen_start.apply(&rho)?;
        let k2 = gen_mid.apply(&(&rho + &k1.scale_real(0.5 * h)))?;
        let k3 = gen_mid.apply(&(&rho + &k2.scale_real(0.5 * h)))?;
        let k4 = gen_end.apply(&(&rho + &k3.scale_real(h)))?;
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_real(2.0);
        let next = &rho + &incr.scale_real(h / 6.0);

        let tr = next.trace();
        let drift = (tr - C64::new(1.0, 0.0)).norm();
        if drift > TRACE_RENORMALIZE_TOL {
            return Err(Error::TraceDrift {
                t: t_next,
                drift,
                limit: TRACE_RENORMALIZE_TOL,
            });
        }
        let next = next.scale_real(1.0 / tr.re);
        let state = DensityMatrix::new(next)?;
        rho = state.matrix().clone();
        out.push((t_next, state));
        gen_start = gen_end;
    }
    Ok(out)
}

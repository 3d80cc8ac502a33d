//! Validated operator and state types.

use serde::{Deserialize, Serialize};

use crate::eigen::jacobi;
use crate::error::{Error, Result};
use crate::linalg::{trace_of_product, vector_norm, ComplexMatrix, C64};

/// Relative Hermiticity tolerance for operators and states.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Allowed deviation of a density matrix trace from one.
pub const TRACE_TOL: f64 = 1e-9;
/// Most negative eigenvalue tolerated in a density matrix.
pub const NEGATIVITY_TOL: f64 = 1e-9;
/// Allowed deviation of a pure-state norm from one.
pub const NORM_TOL: f64 = 1e-10;

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    let deviation = m.hermiticity_defect();
    if deviation > HERMITIAN_TOL * m.max_norm().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// A Hermitian matrix (Hamiltonians, observables).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        check_hermitian(&m)?;
        Ok(HermitianOperator(m))
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator(ComplexMatrix::zeros(dim))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

impl TryFrom<ComplexMatrix> for HermitianOperator {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        HermitianOperator::new(m)
    }
}

impl From<HermitianOperator> for ComplexMatrix {
    fn from(h: HermitianOperator) -> Self {
        h.0
    }
}

/// A density matrix: Hermitian, unit trace, positive semidefinite (all to
/// the tolerances above).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        check_hermitian(&m).map_err(|e| Error::InvalidDensityMatrix(e.to_string()))?;
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}, expected 1")));
        }
        let lowest = jacobi(&m).values[0];
        if lowest < -NEGATIVITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {lowest:e}")));
        }
        Ok(DensityMatrix(m))
    }

    /// Validates after dividing by the trace.
    pub fn normalized(m: ComplexMatrix) -> Result<Self> {
        let tr = m.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidDensityMatrix(format!("non-positive trace {tr}")));
        }
        Self::new(m.scale_real(1.0 / tr))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        DensityMatrix(ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0.get(i, j)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        jacobi(&self.0).values
    }
}

impl TryFrom<ComplexMatrix> for DensityMatrix {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        DensityMatrix::new(m)
    }
}

impl From<DensityMatrix> for ComplexMatrix {
    fn from(r: DensityMatrix) -> Self {
        r.0
    }
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::param("amplitudes", "state vector is empty"));
        }
        let norm = vector_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(PureState { amplitudes })
    }

    /// Divides by the norm; fails only for the zero vector.
    pub fn normalize(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vector_norm(&amplitudes);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        for a in amplitudes.iter_mut() {
            *a /= norm;
        }
        Ok(PureState { amplitudes })
    }

    pub(crate) fn from_normalized_unchecked(amplitudes: Vec<C64>) -> Self {
        PureState { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// `Tr(op ρ)`.
pub fn expectation(op: &ComplexMatrix, rho: &DensityMatrix) -> Result<C64> {
    trace_of_product(op, rho.matrix())
}

/// `½ Σ |λ_i(ρ - σ)|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let diff = rho.matrix() - sigma.matrix();
    Ok(0.5 * jacobi(&diff).values.iter().map(|x| x.abs()).sum::<f64>())
}

use thiserror::Error;

/// Errors raised by the simulation and optimization routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix of dimension {dim} needs {expected} entries, got {found}")]
    BadShape { dim: usize, expected: usize, found: usize },

    #[error("operator is not Hermitian: max |M - M†| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("state vector is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("U is not unitary: max |UU† - I| = {deviation:e} exceeds tolerance {tolerance:e}")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("trace drift {drift:e} at t = {t} exceeds {limit:e}; reduce the time step")]
    TraceDrift { t: f64, drift: f64, limit: f64 },

    #[error("time step too large: dt * |sum L†L| = {value:e} exceeds {limit:e}")]
    StepTooLarge { value: f64, limit: f64 },

    #[error("all jump probabilities vanish at t = {t}")]
    DeadState { t: f64 },

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("trajectory records are defined on different time grids")]
    GridMismatch,

    #[error("schedule provides no Hamiltonian derivative at t = {t}")]
    MissingDerivative { t: f64 },

    #[error("alpha with magnitude {alpha_mag} is unreachable: both thermal rates vanish")]
    UnreachableAlpha { alpha_mag: f64 },

    #[error("optimal phase is undefined: the state has no coherence rho_ge")]
    NoCoherence,

    #[error("search space has no `{0}` values")]
    EmptySearchSpace(&'static str),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

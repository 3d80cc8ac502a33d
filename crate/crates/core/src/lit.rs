//! Invariance transformations of the master equation.
//!
//! A transformation `(U, Γ, φ)` maps a strategy `{H, L_μ}` to
//!
//! ```text
//! L'_μ = Σ_ν U_μν L_ν + Γ_μ 𝟙
//! H'   = H + δH,  δH = (1/2i) Σ_μν (Γ*_μ U_μν L_ν − Γ_μ U*_μν L_ν†) + φ 𝟙
//! ```
//!
//! and leaves the generator, hence `ρ(t)`, unchanged.

use serde::{Deserialize, Serialize};

use crate::dynamics::{superoperator_matrix, Strategy, StrategySchedule};
use crate::error::{Error, Result};
use crate::linalg::{pauli, ComplexMatrix, C64, I, ZERO};
use crate::state::HermitianOperator;
use crate::thermal::QubitThermalModel;

/// Maximum `|UU† − I|` accepted for the channel-mixing matrix.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LitParamsRepr", into = "LitParamsRepr")]
pub struct LITParams {
    u: ComplexMatrix,
    gamma: Vec<C64>,
    phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexVectorRepr {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// JSON wire form `{"U": matrix, "Gamma": {"re": [...], "im": [...]}, "phi": x}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LitParamsRepr {
    #[serde(rename = "U")]
    pub u: ComplexMatrix,
    #[serde(rename = "Gamma")]
    pub gamma: ComplexVectorRepr,
    pub phi: f64,
}

impl TryFrom<LitParamsRepr> for LITParams {
    type Error = Error;
    fn try_from(r: LitParamsRepr) -> Result<Self> {
        if r.gamma.re.len() != r.gamma.im.len() {
            return Err(Error::param("Gamma", "re and im have different lengths"));
        }
        let gamma = r
            .gamma
            .re
            .iter()
            .zip(&r.gamma.im)
            .map(|(&a, &b)| C64::new(a, b))
            .collect();
        LITParams::new(r.u, gamma, r.phi)
    }
}

impl From<LITParams> for LitParamsRepr {
    fn from(p: LITParams) -> Self {
        LitParamsRepr {
            u: p.u,
            gamma: ComplexVectorRepr {
                re: p.gamma.iter().map(|z| z.re).collect(),
                im: p.gamma.iter().map(|z| z.im).collect(),
            },
            phi: p.phi,
        }
    }
}

impl LITParams {
    pub fn new(u: ComplexMatrix, gamma: Vec<C64>, phi: f64) -> Result<Self> {
        let deviation = u.unitarity_defect();
        if !(deviation <= UNITARITY_TOL) {
            return Err(Error::NotUnitary {
                deviation,
                tolerance: UNITARITY_TOL,
            });
        }
        if gamma.len() != u.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                found: gamma.len(),
            });
        }
        if !phi.is_finite() {
            return Err(Error::param("phi", "must be finite"));
        }
        Ok(LITParams { u, gamma, phi })
    }

    pub fn identity(channels: usize) -> Self {
        LITParams {
            u: ComplexMatrix::identity(channels),
            gamma: vec![ZERO; channels],
            phi: 0.0,
        }
    }

    pub fn channels(&self) -> usize {
        self.u.dim()
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn gamma(&self) -> &[C64] {
        &self.gamma
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `(U†, −U†Γ, −φ)`.
    pub fn inverse(&self) -> Self {
        let u_dag = self.u.dagger();
        let gamma = u_dag.matvec(&self.gamma).into_iter().map(|z| -z).collect();
        LITParams {
            u: u_dag,
            gamma,
            phi: -self.phi,
        }
    }
}

/// Time derivative of a transformation's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LitRate {
    pub du: ComplexMatrix,
    pub dgamma: Vec<C64>,
    pub dphi: f64,
}

impl LitRate {
    pub fn zero(channels: usize) -> Self {
        LitRate {
            du: ComplexMatrix::zeros(channels),
            dgamma: vec![ZERO; channels],
            dphi: 0.0,
        }
    }
}

/// Transformation parameters as a function of time.
pub trait LitSchedule: Sync {
    fn params_at(&self, t: f64) -> Result<LITParams>;

    /// Analytic derivative of the parameters, when known.
    fn params_rate(&self, t: f64) -> Result<Option<LitRate>>;
}

impl LitSchedule for LITParams {
    fn params_at(&self, _t: f64) -> Result<LITParams> {
        Ok(self.clone())
    }

    fn params_rate(&self, _t: f64) -> Result<Option<LitRate>> {
        Ok(Some(LitRate::zero(self.channels())))
    }
}

/// A schedule built from closures; `rate` may be omitted.
pub struct FnLitSchedule<P, R = fn(f64) -> Result<LitRate>> {
    pub params: P,
    pub rate: Option<R>,
}

impl<P, R> LitSchedule for FnLitSchedule<P, R>
where
    P: Fn(f64) -> Result<LITParams> + Sync,
    R: Fn(f64) -> Result<LitRate> + Sync,
{
    fn params_at(&self, t: f64) -> Result<LITParams> {
        (self.params)(t)
    }

    fn params_rate(&self, t: f64) -> Result<Option<LitRate>> {
        self.rate.as_ref().map(|r| r(t)).transpose()
    }
}

fn check_channels(s: &Strategy, channels: usize) -> Result<()> {
    if channels != s.lindblad_ops().len() {
        return Err(Error::DimensionMismatch {
            expected: s.lindblad_ops().len(),
            found: channels,
        });
    }
    Ok(())
}

/// `Σ_μν c_μ U_μν L_ν` for coefficients `c`.
fn weighted_jumps(s: &Strategy, coeffs: &[C64], u: &ComplexMatrix) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(s.dim());
    for (nu, l) in s.lindblad_ops().iter().enumerate() {
        let w: C64 = coeffs.iter().enumerate().map(|(mu, c)| c * u.get(mu, nu)).sum();
        if w != ZERO {
            acc = &acc + &l.scale(w);
        }
    }
    acc
}

/// `(A − A†)/(2i)`, Hermitian by construction.
fn anti_hermitian_to_hermitian(a: &ComplexMatrix) -> ComplexMatrix {
    (a - &a.dagger()).scale(C64::new(0.0, -0.5))
}

/// The Hamiltonian shift `δH` produced by `p` on `s`.
pub fn delta_hamiltonian(s: &Strategy, p: &LITParams) -> Result<HermitianOperator> {
    check_channels(s, p.channels())?;
    let conj: Vec<C64> = p.gamma.iter().map(|g| g.conj()).collect();
    let a = weighted_jumps(s, &conj, &p.u);
    let dh = &anti_hermitian_to_hermitian(&a) + &ComplexMatrix::identity(s.dim()).scale_real(p.phi);
    HermitianOperator::new(dh)
}

/// `∂δH/∂t` for parameters `p` moving at `rate` (the operators of `s` are
/// held fixed).
pub fn delta_hamiltonian_rate(s: &Strategy, p: &LITParams, rate: &LitRate) -> Result<ComplexMatrix> {
    check_channels(s, p.channels())?;
    check_channels(s, rate.dgamma.len())?;
    check_channels(s, rate.du.dim())?;
    let dconj: Vec<C64> = rate.dgamma.iter().map(|g| g.conj()).collect();
    let conj: Vec<C64> = p.gamma.iter().map(|g| g.conj()).collect();
    let a_dot = &weighted_jumps(s, &dconj, &p.u) + &weighted_jumps(s, &conj, &rate.du);
    Ok(&anti_hermitian_to_hermitian(&a_dot) + &ComplexMatrix::identity(s.dim()).scale_real(rate.dphi))
}

/// Applies `p` to `s`. The label is kept.
pub fn apply_lit(s: &Strategy, p: &LITParams) -> Result<Strategy> {
    check_channels(s, p.channels())?;
    let d = s.dim();
    let id = ComplexMatrix::identity(d);
    let ops = s.lindblad_ops();
    let mut new_ops = Vec::with_capacity(ops.len());
    for mu in 0..ops.len() {
        let mut l = id.scale(p.gamma[mu]);
        for (nu, op) in ops.iter().enumerate() {
            l = &l + &op.scale(p.u.get(mu, nu));
        }
        new_ops.push(l);
    }
    let dh = delta_hamiltonian(s, p)?;
    let h = HermitianOperator::new(s.hamiltonian().matrix() + dh.matrix())?;
    Strategy::new(s.label(), h, new_ops)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceCheck {
    pub invariant: bool,
    pub max_deviation: f64,
}

/// Compares the superoperators of two strategies in max-norm.
pub fn verify_invariance(s: &Strategy, s_prime: &Strategy, tol: f64) -> Result<InvarianceCheck> {
    if s.dim() != s_prime.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: s_prime.dim(),
        });
    }
    let max_deviation = superoperator_matrix(s).max_abs_diff(&superoperator_matrix(s_prime));
    Ok(InvarianceCheck {
        invariant: max_deviation <= tol,
        max_deviation,
    })
}

/// Returns `p` with `apply_lit(s, p) = apply_lit(apply_lit(s, p1), p2)`.
///
/// `U = U₂U₁`, `Γ = U₂Γ₁ + Γ₂`, and the crossing of `Γ₂` with `U₂Γ₁` leaves
/// the scalar `Im(Γ₂† U₂ Γ₁)` in the Hamiltonian, so
/// `φ = φ₁ + φ₂ + Im(Σ_μ Γ₂*_μ (U₂Γ₁)_μ)`.
pub fn compose_lit(p2: &LITParams, p1: &LITParams) -> Result<LITParams> {
    if p1.channels() != p2.channels() {
        return Err(Error::DimensionMismatch {
            expected: p1.channels(),
            found: p2.channels(),
        });
    }
    let u = &p2.u * &p1.u;
    let rotated = p2.u.matvec(&p1.gamma);
    let cross: C64 = p2.gamma.iter().zip(&rotated).map(|(a, b)| a.conj() * b).sum();
    let gamma = rotated.iter().zip(&p2.gamma).map(|(a, b)| a + b).collect();
    LITParams::new(u, gamma, p1.phi + p2.phi + cross.im)
}

/// Strategy `base` transformed by a (possibly time-dependent) schedule.
pub struct TransformedSchedule<'a> {
    pub base: &'a Strategy,
    pub lit: &'a dyn LitSchedule,
}

impl<'a> TransformedSchedule<'a> {
    pub fn new(base: &'a Strategy, lit: &'a dyn LitSchedule) -> Self {
        TransformedSchedule { base, lit }
    }
}

impl StrategySchedule for TransformedSchedule<'_> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn strategy_at(&self, t: f64) -> Result<Strategy> {
        apply_lit(self.base, &self.lit.params_at(t)?)
    }

    fn hamiltonian_rate(&self, t: f64) -> Result<Option<ComplexMatrix>> {
        match self.lit.params_rate(t)? {
            Some(rate) => {
                let p = self.lit.params_at(t)?;
                delta_hamiltonian_rate(self.base, &p, &rate).map(Some)
            }
            None => Ok(None),
        }
    }
}

/// The restricted qubit family `α(t) = |α| e^{i(θ₀ + θ̇ t)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitLITParams {
    pub alpha_mag: f64,
    pub theta0: f64,
    pub theta_rate: f64,
}

impl QubitLITParams {
    pub fn new(alpha_mag: f64, theta0: f64, theta_rate: f64) -> Result<Self> {
        let q = QubitLITParams {
            alpha_mag,
            theta0,
            theta_rate,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_mag >= 0.0) || !self.alpha_mag.is_finite() {
            return Err(Error::param("alpha_mag", "must be non-negative and finite"));
        }
        if !self.theta0.is_finite() || !self.theta_rate.is_finite() {
            return Err(Error::param("theta0", "phases must be finite"));
        }
        Ok(())
    }

    pub fn theta(&self, t: f64) -> f64 {
        self.theta0 + self.theta_rate * t
    }

    pub fn alpha(&self, t: f64) -> C64 {
        C64::from_polar(self.alpha_mag, self.theta(t))
    }

    /// `dα/dt = iθ̇ α`.
    pub fn alpha_rate(&self, t: f64) -> C64 {
        I * self.theta_rate * self.alpha(t)
    }
}

fn check_qubit_channels(p: &LITParams) -> Result<()> {
    if p.channels() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: p.channels(),
        });
    }
    Ok(())
}

/// `α = −i(Γ*_μ U_{μ+} √γ₊ − Γ_μ U*_{μ−} √γ₋)` for the channel order `[+, −]`.
pub fn qubit_alpha(p: &LITParams, m: &QubitThermalModel) -> Result<C64> {
    check_qubit_channels(p)?;
    let (sp, sm) = (m.gamma_plus().sqrt(), m.gamma_minus().sqrt());
    let mut z = ZERO;
    for mu in 0..2 {
        z += p.gamma[mu].conj() * p.u.get(mu, 0) * sp;
        z -= p.gamma[mu] * p.u.get(mu, 1).conj() * sm;
    }
    Ok(-I * z)
}

/// `δH = ½(Re α σx − Im α σy) = ½(α σ₊ + α* σ₋)`.
///
/// The factor ½ is what the transformation rule produces for the thermal
/// qubit strategy; it is also the normalization under which the closed-form
/// eigensystem and the coherence-to-flux formula hold.
pub fn qubit_delta_h(alpha: C64) -> HermitianOperator {
    let m = &pauli::sigma_x().scale_real(alpha.re * 0.5) - &pauli::sigma_y().scale_real(alpha.im * 0.5);
    HermitianOperator::new(m).expect("hermitian by construction")
}

/// Γ with `U = 𝟙` realizing `alpha` through a single channel: the `+`
/// channel when `γ₊ > 0`, otherwise the `−` channel. Real-linear in `alpha`.
fn gamma_for_alpha(alpha: C64, m: &QubitThermalModel) -> Result<Vec<C64>> {
    let gp = m.gamma_plus();
    let gm = m.gamma_minus();
    if gp > 0.0 {
        Ok(vec![(I * alpha).conj() / gp.sqrt(), ZERO])
    } else if gm > 0.0 {
        Ok(vec![ZERO, -I * alpha / gm.sqrt()])
    } else if alpha == ZERO {
        Ok(vec![ZERO, ZERO])
    } else {
        Err(Error::UnreachableAlpha {
            alpha_mag: alpha.norm(),
        })
    }
}

/// The simplest transformation (`U = 𝟙`, one nonzero Γ, `φ = 0`) whose
/// [`qubit_alpha`] is `q.alpha(t)`.
pub fn qubit_lit_from_alpha(q: &QubitLITParams, m: &QubitThermalModel, t: f64) -> Result<LITParams> {
    q.validate()?;
    if q.alpha_mag == 0.0 {
        return Ok(LITParams::identity(2));
    }
    let gamma = gamma_for_alpha(q.alpha(t), m)?;
    LITParams::new(ComplexMatrix::identity(2), gamma, 0.0)
}

/// [`qubit_lit_from_alpha`] as a schedule, with its analytic rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitLitSchedule {
    pub q: QubitLITParams,
    pub model: QubitThermalModel,
}

impl QubitLitSchedule {
    pub fn new(q: QubitLITParams, model: QubitThermalModel) -> Result<Self> {
        q.validate()?;
        model.validate()?;
        if q.alpha_mag > 0.0 && model.gamma_plus() == 0.0 && model.gamma_minus() == 0.0 {
            return Err(Error::UnreachableAlpha { alpha_mag: q.alpha_mag });
        }
        Ok(QubitLitSchedule { q, model })
    }
}

impl LitSchedule for QubitLitSchedule {
    fn params_at(&self, t: f64) -> Result<LITParams> {
        qubit_lit_from_alpha(&self.q, &self.model, t)
    }

    fn params_rate(&self, t: f64) -> Result<Option<LitRate>> {
        if self.q.alpha_mag == 0.0 {
            return Ok(Some(LitRate::zero(2)));
        }
        Ok(Some(LitRate {
            du: ComplexMatrix::zeros(2),
            dgamma: gamma_for_alpha(self.q.alpha_rate(t), &self.model)?,
            dphi: 0.0,
        }))
    }
}

//! The qubit in contact with a thermal bath, and Gibbs states.

use serde::{Deserialize, Serialize};

use crate::dynamics::Strategy;
use crate::eigen::hermitian_eigensystem;
use crate::error::{Error, Result};
use crate::linalg::{pauli, ComplexMatrix, C64};
use crate::state::{DensityMatrix, HermitianOperator, PureState};

/// Qubit with splitting `omega` coupled to a bath at inverse temperature
/// `beta_f`. Emission and absorption rates follow the Bose-Einstein
/// occupation `n̄ = 1/(e^{β_f ω} - 1)`: `γ₊ = γ₀ n̄`, `γ₋ = γ₀ (n̄ + 1)`.
///
/// `beta_f = +∞` is the zero-temperature limit (`γ₊ = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitThermalModel {
    pub omega: f64,
    pub gamma0: f64,
    pub beta_f: f64,
}

impl QubitThermalModel {
    pub fn new(omega: f64, gamma0: f64, beta_f: f64) -> Result<Self> {
        let m = QubitThermalModel { omega, gamma0, beta_f };
        m.validate()?;
        Ok(m)
    }

    pub fn zero_temperature(omega: f64, gamma0: f64) -> Result<Self> {
        Self::new(omega, gamma0, f64::INFINITY)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::param("omega", "must be positive and finite"));
        }
        if !(self.gamma0 > 0.0) || !self.gamma0.is_finite() {
            return Err(Error::param("gamma0", "must be positive and finite"));
        }
        if !(self.beta_f > 0.0) {
            return Err(Error::param("beta_f", "must be positive"));
        }
        Ok(())
    }

    /// Mean bath occupation at the qubit frequency.
    pub fn mean_occupation(&self) -> f64 {
        1.0 / (self.beta_f * self.omega).exp_m1()
    }

    pub fn gamma_plus(&self) -> f64 {
        self.gamma0 * self.mean_occupation()
    }

    pub fn gamma_minus(&self) -> f64 {
        self.gamma0 * (self.mean_occupation() + 1.0)
    }

    /// `H = (ω/2) σz`.
    pub fn hamiltonian(&self) -> HermitianOperator {
        HermitianOperator::new(pauli::sigma_z().scale_real(self.omega / 2.0)).expect("diagonal")
    }

    /// The Gibbs state the dynamics relaxes to.
    pub fn asymptotic_state(&self) -> DensityMatrix {
        gibbs_state(&self.hamiltonian(), self.beta_f).expect("beta_f validated")
    }
}

/// `{H = (ω/2)σz, L = [√γ₊ σ₊, √γ₋ σ₋]}`, channel order `[+, −]`.
pub fn make_qubit_thermal_strategy(m: &QubitThermalModel) -> Strategy {
    Strategy::new(
        "thermal",
        m.hamiltonian(),
        vec![
            pauli::sigma_plus().scale_real(m.gamma_plus().sqrt()),
            pauli::sigma_minus().scale_real(m.gamma_minus().sqrt()),
        ],
    )
    .expect("qubit operators share dimension 2")
}

/// `e^{-βH} / Tr e^{-βH}`; `beta = +∞` gives the (uniform) ground-space
/// projector.
pub fn gibbs_state(h: &HermitianOperator, beta: f64) -> Result<DensityMatrix> {
    if !(beta > 0.0) {
        return Err(Error::param("beta", "must be positive"));
    }
    let es = hermitian_eigensystem(h);
    let e_min = es.values[0];
    let weights: Vec<f64> = if beta.is_infinite() {
        let scale = es.values.iter().map(|e| e.abs()).fold(1.0, f64::max);
        es.values
            .iter()
            .map(|&e| if e - e_min <= 1e-12 * scale { 1.0 } else { 0.0 })
            .collect()
    } else {
        es.values.iter().map(|&e| (-beta * (e - e_min)).exp()).collect()
    };
    let z: f64 = weights.iter().sum();
    let d = h.dim();
    let m = ComplexMatrix::from_fn(d, |i, j| {
        (0..d)
            .map(|k| es.vectors.get(i, k) * es.vectors.get(j, k).conj() * (weights[k] / z))
            .sum()
    });
    DensityMatrix::new(m.hermitian_part())
}

/// The pure state with Boltzmann populations, `√p_g|g⟩ + √p_e|e⟩`, for the
/// qubit Hamiltonian of `m` at inverse temperature `beta`.
pub fn boltzmann_pure_state(m: &QubitThermalModel, beta: f64) -> Result<PureState> {
    let rho = gibbs_state(&m.hamiltonian(), beta)?;
    PureState::normalize(vec![
        C64::new(rho.get(0, 0).re.max(0.0).sqrt(), 0.0),
        C64::new(rho.get(1, 1).re.max(0.0).sqrt(), 0.0),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::generator_apply;

    #[test]
    fn detailed_balance() {
        for beta in [0.1, 1.0, 3.0, 7.5] {
            let m = QubitThermalModel::new(1.3, 0.02, beta).unwrap();
            let ratio = m.gamma_plus() / m.gamma_minus();
            let expected = (-beta * 1.3f64).exp();
            assert!((ratio / expected - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn rates_at_unit_temperature() {
        let m = QubitThermalModel::new(1.0, 1e-2, 1.0).unwrap();
        let nbar = 1.0 / (std::f64::consts::E - 1.0);
        assert!((m.mean_occupation() - 0.58198).abs() < 1e-5);
        assert!((m.gamma_minus() - 1e-2 * (1.0 + nbar)).abs() < 1e-15);
    }

    #[test]
    fn zero_temperature_has_no_absorption() {
        let m = QubitThermalModel::zero_temperature(1.0, 0.1).unwrap();
        assert_eq!(m.gamma_plus(), 0.0);
        assert_eq!(m.gamma_minus(), 0.1);
        let g = m.asymptotic_state();
        assert_eq!(g.get(0, 0).re, 1.0);
    }

    #[test]
    fn gibbs_state_is_stationary() {
        for beta in [0.2, 1.0, 5.0] {
            let m = QubitThermalModel::new(1.0, 1e-2, beta).unwrap();
            let s = make_qubit_thermal_strategy(&m);
            let g = generator_apply(&s, &m.asymptotic_state()).unwrap();
            assert!(g.max_norm() <= 1e-12);
        }
    }

    #[test]
    fn gibbs_populations() {
        let m = QubitThermalModel::new(1.0, 1e-2, 1.0).unwrap();
        let rho = gibbs_state(&m.hamiltonian(), 1.0).unwrap();
        let e = (-1.0f64).exp();
        assert!((rho.get(0, 0).re - 1.0 / (1.0 + e)).abs() < 1e-14);
        assert!((rho.get(0, 0).re - 0.73106).abs() < 1e-5);
        assert!((rho.get(1, 1).re - 0.26894).abs() < 1e-5);
        let cold = gibbs_state(&m.hamiltonian(), 5.0).unwrap();
        assert!((cold.get(0, 0).re - 0.99331).abs() < 1e-5);
        let hot = gibbs_state(&m.hamiltonian(), 1e-9).unwrap();
        assert!(
            hot.matrix()
                .max_abs_diff(&DensityMatrix::maximally_mixed(2).into_matrix())
                < 1e-6
        );
        assert!(gibbs_state(&m.hamiltonian(), 0.0).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(QubitThermalModel::new(1.0, -0.01, 1.0).is_err());
        assert!(QubitThermalModel::new(0.0, 0.01, 1.0).is_err());
        assert!(QubitThermalModel::new(1.0, 0.01, 0.0).is_err());
    }

    #[test]
    fn strategy_channel_order() {
        let m = QubitThermalModel::new(1.0, 0.5, 2.0).unwrap();
        let s = make_qubit_thermal_strategy(&m);
        let ops = s.lindblad_ops();
        assert_eq!(ops[0], pauli::sigma_plus().scale_real(m.gamma_plus().sqrt()));
        assert_eq!(ops[1], pauli::sigma_minus().scale_real(m.gamma_minus().sqrt()));
    }
}

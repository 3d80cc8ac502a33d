//! Strategy-dependent quantities: internal energy, energy flux and its
//! correction under a transformation, and ergotropy.

use serde::{Deserialize, Serialize};

use crate::dynamics::{generator_apply, Strategy, StrategySchedule};
use crate::eigen::{hermitian_eigensystem, jacobi};
use crate::error::{Error, Result};
use crate::linalg::{commutator, trace_of_product, ComplexMatrix, C64, I, ZERO};
use crate::lit::{delta_hamiltonian, delta_hamiltonian_rate, LitSchedule, QubitLITParams};
use crate::state::{expectation, DensityMatrix, HermitianOperator};
use crate::thermal::QubitThermalModel;

/// Step of the central difference used for `⟨∂_t δH⟩` when a schedule has
/// no analytic rate.
pub const FALLBACK_DIFF_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxSample {
    pub t: f64,
    pub power: f64,
    pub strategy_label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErgotropyReport {
    pub value: f64,
    pub passive_energy: f64,
    pub internal_energy: f64,
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

/// `Tr(Hρ)`.
pub fn internal_energy(h: &HermitianOperator, rho: &DensityMatrix) -> Result<f64> {
    Ok(expectation(h.matrix(), rho)?.re)
}

/// `𝒫 = ∂_t Tr(Hρ) = Tr(H 𝓛(ρ)) + Tr(∂_t H ρ)`.
pub fn energy_flux(schedule: &dyn StrategySchedule, rho: &DensityMatrix, t: f64) -> Result<FluxSample> {
    let s = schedule.strategy_at(t)?;
    check_dims(s.dim(), rho.dim())?;
    let drho = generator_apply(&s, rho)?;
    let mut power = trace_of_product(s.hamiltonian().matrix(), &drho)?.re;
    if !schedule.is_static() {
        let rate = schedule.hamiltonian_rate(t)?.ok_or(Error::MissingDerivative { t })?;
        power += expectation(&rate, rho)?.re;
    }
    Ok(FluxSample {
        t,
        power,
        strategy_label: s.label().to_string(),
    })
}

/// Flux correction `δ𝒫_G = i⟨[H,δH]⟩ + Re⟨L_μ†[δH,L_μ]⟩ + ⟨∂_t δH⟩` from
/// switching `s` to the strategy the schedule produces at `t`.
pub fn delta_flux_general(s: &Strategy, lit: &dyn LitSchedule, rho: &DensityMatrix, t: f64) -> Result<f64> {
    check_dims(s.dim(), rho.dim())?;
    let p = lit.params_at(t)?;
    let dh = delta_hamiltonian(s, &p)?;
    let dh = dh.matrix();

    let mut total = (I * expectation(&commutator(s.hamiltonian().matrix(), dh)?, rho)?).re;
    for l in s.lindblad_ops() {
        let term = &l.dagger() * &commutator(dh, l)?;
        total += expectation(&term, rho)?.re;
    }

    let dh_rate = match lit.params_rate(t)? {
        Some(rate) => delta_hamiltonian_rate(s, &p, &rate)?,
        None => {
            let h = FALLBACK_DIFF_STEP;
            let ahead = delta_hamiltonian(s, &lit.params_at(t + h)?)?;
            let behind = delta_hamiltonian(s, &lit.params_at(t - h)?)?;
            (ahead.matrix() - behind.matrix()).scale_real(0.5 / h)
        }
    };
    total += expectation(&dh_rate, rho)?.re;
    Ok(total)
}

/// Closed-form qubit flux correction for `α(t) = |α|e^{i(θ₀+θ̇t)}`:
/// `δ𝒫_G = (α/2)[i(ω+θ̇) − (γ₊+γ₋)/2] ρ_ge + c.c.` with `ρ_ge = ⟨g|ρ|e⟩`.
pub fn delta_flux_qubit(q: &QubitLITParams, m: &QubitThermalModel, rho: &DensityMatrix, t: f64) -> Result<f64> {
    check_dims(2, rho.dim())?;
    let coefficient = qubit_flux_coefficient(q, m);
    Ok((q.alpha(t) * coefficient * rho.get(0, 1)).re)
}

/// `i(ω+θ̇) − (γ₊+γ₋)/2`.
pub(crate) fn qubit_flux_coefficient(q: &QubitLITParams, m: &QubitThermalModel) -> C64 {
    C64::new(-(m.gamma_plus() + m.gamma_minus()) / 2.0, m.omega + q.theta_rate)
}

/// Maximal unitarily extractable work, `Tr(Hρ) − Σ_i p_i^dec E_i` with the
/// populations of ρ in decreasing order paired against the energies of H in
/// increasing order.
pub fn ergotropy(h: &HermitianOperator, rho: &DensityMatrix) -> Result<ErgotropyReport> {
    check_dims(h.dim(), rho.dim())?;
    let energies = hermitian_eigensystem(h).values;
    let mut populations = jacobi(rho.matrix()).values;
    populations.reverse();
    let passive_energy: f64 = populations.iter().zip(&energies).map(|(p, e)| p * e).sum();
    let internal_energy = internal_energy(h, rho)?;
    Ok(ErgotropyReport {
        value: internal_energy - passive_energy,
        passive_energy,
        internal_energy,
    })
}

/// `G(α) = ½√(1 + |α|²/ω²) − ½`, evaluated without cancellation.
pub fn gap_factor(alpha: C64, omega: f64) -> f64 {
    let x = alpha.norm_sqr() / (omega * omega);
    0.5 * x / ((1.0 + x).sqrt() + 1.0)
}

/// Closed-form eigensystem of `H' = (ω/2)σz + δH(α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitHPrimeEigensystem {
    pub e_plus: f64,
    pub e_minus: f64,
    pub psi_plus: [C64; 2],
    pub psi_minus: [C64; 2],
    pub g: f64,
    pub n1: f64,
    pub n2: f64,
}

/// `E± = ±(ω/2)(2G+1)`, `|ψ₊⟩ = √n₁|g⟩ + e^{iθ}√n₂|e⟩`,
/// `|ψ₋⟩ = √n₂|g⟩ − e^{iθ}√n₁|e⟩` with `θ = arg α`, `n₁ = G/(2G+1)`,
/// `n₂ = (G+1)/(2G+1)`.
///
/// With `ρ_ge = ⟨g|ρ|e⟩` and `δH = ½(ασ₊ + α*σ₋)` the excited-state
/// component carries `e^{+iθ}`.
pub fn qubit_hprime_eigensystem(alpha: C64, omega: f64) -> Result<QubitHPrimeEigensystem> {
    if !(omega > 0.0) {
        return Err(Error::param("omega", "must be positive"));
    }
    let g = gap_factor(alpha, omega);
    let n1 = g / (2.0 * g + 1.0);
    let n2 = (g + 1.0) / (2.0 * g + 1.0);
    let phase = if alpha == ZERO {
        C64::new(1.0, 0.0)
    } else {
        alpha / alpha.norm()
    };
    let e_plus = 0.5 * omega * (2.0 * g + 1.0);
    Ok(QubitHPrimeEigensystem {
        e_plus,
        e_minus: -e_plus,
        psi_plus: [C64::new(n1.sqrt(), 0.0), phase * n2.sqrt()],
        psi_minus: [C64::new(n2.sqrt(), 0.0), -phase * n1.sqrt()],
        g,
        n1,
        n2,
    })
}

/// `ℰ[H', ρ^as] = G(α) ω (ρ^as_gg − ρ^as_ee)`.
pub fn qubit_asymptotic_ergotropy(alpha: C64, m: &QubitThermalModel) -> f64 {
    let rho = m.asymptotic_state();
    gap_factor(alpha, m.omega) * m.omega * (rho.get(0, 0).re - rho.get(1, 1).re)
}

/// `H' = (ω/2)σz + δH(α)` for the thermal qubit.
pub fn qubit_transformed_hamiltonian(alpha: C64, m: &QubitThermalModel) -> HermitianOperator {
    let h: ComplexMatrix = m.hamiltonian().matrix() + crate::lit::qubit_delta_h(alpha).matrix();
    HermitianOperator::new(h).expect("sum of Hermitian operators")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inner, pauli, ONE};
    use crate::lit::{apply_lit, qubit_lit_from_alpha, QubitLitSchedule, TransformedSchedule};
    use crate::random::{haar_unitary, random_density_matrix, random_pure_state};
    use crate::state::PureState;
    use crate::thermal::{gibbs_state, make_qubit_thermal_strategy};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model() -> QubitThermalModel {
        QubitThermalModel::new(1.0, 0.1, 1.0).unwrap()
    }

    fn qubit_h(omega: f64) -> HermitianOperator {
        HermitianOperator::new(pauli::sigma_z().scale_real(omega / 2.0)).unwrap()
    }

    #[test]
    fn internal_energy_examples() {
        let g = PureState::new(pauli::ground().to_vec()).unwrap().projector();
        assert_eq!(internal_energy(&qubit_h(2.0), &g).unwrap(), -1.0);
        assert_eq!(
            internal_energy(&qubit_h(2.0), &DensityMatrix::maximally_mixed(2)).unwrap(),
            0.0
        );
        let m = model();
        let rho = m.asymptotic_state();
        let hp = qubit_transformed_hamiltonian(C64::new(0.3, -0.8), &m);
        let a = internal_energy(&hp, &rho).unwrap();
        let b = internal_energy(&m.hamiltonian(), &rho).unwrap();
        assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn flux_vanishes_when_stationary_or_closed() {
        let m = model();
        let s = make_qubit_thermal_strategy(&m);
        assert!(energy_flux(&s, &m.asymptotic_state(), 0.0).unwrap().power.abs() <= 1e-12);
        let closed = Strategy::new("closed", m.hamiltonian(), vec![]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density_matrix(&mut rng, 2);
        assert!(energy_flux(&closed, &rho, 0.0).unwrap().power.abs() <= 1e-12);
    }

    #[test]
    fn missing_rate_is_reported() {
        let m = model();
        let s = make_qubit_thermal_strategy(&m);
        let lit = crate::lit::FnLitSchedule::<_, fn(f64) -> Result<crate::lit::LitRate>> {
            params: |t: f64| qubit_lit_from_alpha(&QubitLITParams::new(0.2, 0.0, 1.0).unwrap(), &m, t),
            rate: None,
        };
        let sched = TransformedSchedule::new(&s, &lit);
        let err = energy_flux(&sched, &m.asymptotic_state(), 1.0).unwrap_err();
        assert_eq!(err, Error::MissingDerivative { t: 1.0 });
        // the general formula falls back to a central difference instead
        let rho = PureState::normalize(vec![ONE, ONE]).unwrap().projector();
        let fd = delta_flux_general(&s, &lit, &rho, 1.0).unwrap();
        let q = QubitLitSchedule::new(QubitLITParams::new(0.2, 0.0, 1.0).unwrap(), m).unwrap();
        let exact = delta_flux_general(&s, &q, &rho, 1.0).unwrap();
        assert!((fd - exact).abs() < 1e-8);
    }

    #[test]
    fn identity_and_diagonal_state_give_no_correction() {
        let m = model();
        let s = make_qubit_thermal_strategy(&m);
        let rho = m.asymptotic_state();
        let id = crate::lit::LITParams::identity(2);
        assert_eq!(delta_flux_general(&s, &id, &rho, 0.0).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let q = QubitLITParams::new(rng.random_range(0.0..2.0), rng.random_range(-3.0..3.0), 0.0).unwrap();
            let sched = QubitLitSchedule::new(q, m).unwrap();
            let p = rng.random_range(0.0..1.0);
            let diag = DensityMatrix::new(ComplexMatrix::from_real_rows(&[[p, 0.0], [0.0, 1.0 - p]])).unwrap();
            assert!(delta_flux_general(&s, &sched, &diag, 0.7).unwrap().abs() <= 1e-12);
            assert_eq!(delta_flux_qubit(&q, &m, &diag, 0.7).unwrap(), 0.0);
        }
    }

    #[test]
    fn flux_difference_equals_correction() {
        let m = model();
        let s = make_qubit_thermal_strategy(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = crate::lit::LITParams::new(
                haar_unitary(&mut rng, 2),
                vec![
                    crate::random::gaussian_complex(&mut rng),
                    crate::random::gaussian_complex(&mut rng),
                ],
                rng.random_range(-1.0..1.0),
            )
            .unwrap();
            let rho = random_density_matrix(&mut rng, 2);
            let s2 = apply_lit(&s, &p).unwrap();
            let diff = energy_flux(&s2, &rho, 0.0).unwrap().power - energy_flux(&s, &rho, 0.0).unwrap().power;
            let corr = delta_flux_general(&s, &p, &rho, 0.0).unwrap();
            assert!((diff - corr).abs() <= 1e-10, "{diff} vs {corr}");
        }
    }

    #[test]
    fn qubit_formula_sign_flip() {
        let m = model();
        let rho = PureState::normalize(vec![ONE, C64::new(0.3, 0.4)]).unwrap().projector();
        let q = QubitLITParams::new(0.5, 0.4, 0.7).unwrap();
        let q_pi = QubitLITParams::new(0.5, 0.4 + std::f64::consts::PI, 0.7).unwrap();
        let a = delta_flux_qubit(&q, &m, &rho, 1.5).unwrap();
        let b = delta_flux_qubit(&q_pi, &m, &rho, 1.5).unwrap();
        assert!((a + b).abs() <= 1e-15 * a.abs().max(1.0));
        assert!(delta_flux_qubit(&q, &m, &DensityMatrix::maximally_mixed(3), 0.0).is_err());
    }

    #[test]
    fn qubit_formula_matches_general_formula() {
        let m = model();
        let s = make_qubit_thermal_strategy(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let q = QubitLITParams::new(
                rng.random_range(0.0..2.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-2.0..2.0),
            )
            .unwrap();
            let sched = QubitLitSchedule::new(q, m).unwrap();
            let rho = random_density_matrix(&mut rng, 2);
            let t = rng.random_range(0.0..100.0);
            let general = delta_flux_general(&s, &sched, &rho, t).unwrap();
            let closed = delta_flux_qubit(&q, &m, &rho, t).unwrap();
            assert!((general - closed).abs() <= 1e-9, "{general} vs {closed}");
        }
    }

    #[test]
    fn ergotropy_examples() {
        let m = model();
        let passive = ergotropy(&m.hamiltonian(), &m.asymptotic_state()).unwrap();
        assert!(passive.value.abs() <= 1e-12);
        let inverted = DensityMatrix::new(ComplexMatrix::from_real_rows(&[[0.2, 0.0], [0.0, 0.8]])).unwrap();
        let r = ergotropy(&qubit_h(1.0), &inverted).unwrap();
        assert!((r.value - 0.6).abs() < 1e-15);
        assert!((r.internal_energy - 0.3).abs() < 1e-15);
        assert!((r.passive_energy + 0.3).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 2..=4 {
            let h = crate::random::random_hermitian_operator(&mut rng, d, 1.0);
            let psi = random_pure_state(&mut rng, d);
            let r = ergotropy(&h, &psi.projector()).unwrap();
            let e_min = hermitian_eigensystem(&h).values[0];
            let mean = inner(psi.amplitudes(), &h.matrix().matvec(psi.amplitudes())).re;
            assert!((r.value - (mean - e_min)).abs() <= 1e-12);
        }
    }

    #[test]
    fn ergotropy_of_gibbs_states_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for d in 2..=5 {
            let h = crate::random::random_hermitian_operator(&mut rng, d, 1.0);
            let rho = gibbs_state(&h, rng.random_range(0.1..5.0)).unwrap();
            let r = ergotropy(&h, &rho).unwrap();
            assert!(r.value.abs() <= 1e-10);
        }
    }

    #[test]
    fn hprime_closed_form() {
        let es = qubit_hprime_eigensystem(ZERO, 1.0).unwrap();
        assert_eq!(es.g, 0.0);
        assert_eq!((es.e_plus, es.e_minus), (0.5, -0.5));
        assert_eq!(es.psi_plus, pauli::excited());
        assert_eq!(es.psi_minus, pauli::ground());

        let es = qubit_hprime_eigensystem(C64::new(1.0, 0.0), 1.0).unwrap();
        assert!((es.g - (2f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        assert!((es.g - 0.207107).abs() < 1e-6);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let alpha = C64::from_polar(rng.random_range(0.0..5.0), rng.random_range(-4.0..4.0));
            let es = qubit_hprime_eigensystem(alpha, 1.7).unwrap();
            assert!((es.n1 + es.n2 - 1.0).abs() <= f64::EPSILON);
        }
        assert!(qubit_hprime_eigensystem(ONE, 0.0).is_err());
    }

    #[test]
    fn hprime_matches_diagonalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let omega = rng.random_range(0.2..3.0);
            let m = QubitThermalModel::new(omega, 0.1, 1.0).unwrap();
            let alpha = C64::from_polar(rng.random_range(0.0..4.0), rng.random_range(-4.0..4.0));
            let closed = qubit_hprime_eigensystem(alpha, omega).unwrap();
            let numeric = hermitian_eigensystem(&qubit_transformed_hamiltonian(alpha, &m));
            assert!((numeric.values[0] - closed.e_minus).abs() <= 1e-10);
            assert!((numeric.values[1] - closed.e_plus).abs() <= 1e-10);
            for (k, psi) in [(0, closed.psi_minus), (1, closed.psi_plus)] {
                let v = numeric.vector(k);
                let p_num = ComplexMatrix::outer(&v, &v);
                let p_closed = ComplexMatrix::outer(&psi, &psi);
                assert!(p_num.max_abs_diff(&p_closed) <= 1e-10);
            }
        }
    }

    #[test]
    fn worked_asymptotic_ergotropy() {
        let m = QubitThermalModel::new(1.0, 1e-2, 1.0).unwrap();
        let alpha = C64::new(1.0, 0.0);
        let closed = qubit_asymptotic_ergotropy(alpha, &m);
        assert!((closed - 0.09571).abs() < 1e-5);
        let hp = qubit_transformed_hamiltonian(alpha, &m);
        let general = ergotropy(&hp, &m.asymptotic_state()).unwrap().value;
        assert!((closed - general).abs() <= 1e-10);
        assert_eq!(qubit_asymptotic_ergotropy(ZERO, &m), 0.0);
    }

    #[test]
    fn asymptotic_ergotropy_grows_with_alpha() {
        let m = model();
        let values: Vec<f64> = (0..=30)
            .map(|k| qubit_asymptotic_ergotropy(C64::new(0.1 * k as f64, 0.0), &m))
            .collect();
        assert!(values.windows(2).all(|w| w[1] >= w[0]));
    }
}

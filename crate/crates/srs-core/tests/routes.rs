//! Cross-route consistency: the independent evaluations of the same
//! amplitudes and probabilities must agree within their numerical budgets.

use srs_core::numerics::QuadratureSpec;
use srs_core::polarizability::{DeltaPotential, DiscreteLevels, PolarizabilityModel};
use srs_core::pulses::{GaussianPulse, PulsePair};
use srs_core::rayleigh::{
    amplitudes_frequency_domain, amplitudes_time_domain, w_t_continuum, w_t_frequency,
    TimeGridSpec,
};

const Z: [f64; 3] = [0.0, 0.0, 1.0];

fn matched_pair(eps0: f64, epst0: f64, w0: f64, tau: f64, dt: f64) -> PulsePair {
    PulsePair::new(
        GaussianPulse::new(eps0, w0, tau, 0.0, Z).unwrap(),
        GaussianPulse::new(epst0, w0, tau, dt, Z).unwrap(),
    )
    .unwrap()
}

#[test]
fn time_vs_frequency_one_level() {
    // one-level atom, w0 tau = 50, gamma = Gamma tau = 10 (delta = Gamma/2)
    let (w0, tau, d2, delta) = (50.0, 1.0, 1.0, 5.0);
    let disc = DiscreteLevels::one_level(w0, d2, delta).unwrap();
    let model = PolarizabilityModel::Discrete(disc.clone());
    let spec = QuadratureSpec::default();
    let grid = TimeGridSpec::default();

    for t0 in [-2.0, -1.0, 0.5, 1.0, 2.0] {
        let pair = matched_pair(1.0, 1.0, w0, tau, t0 * tau);
        let ft = amplitudes_frequency_domain(&pair, &model, &spec).unwrap();
        let tt = amplitudes_time_domain(&pair, &disc, &grid).unwrap();
        assert!(ft.converged && tt.converged);
        let em = (ft.em - tt.em).norm() / ft.em.norm();
        let ab = (ft.abs - tt.abs).norm() / ft.abs.norm();
        assert!(em < 1e-3 && ab < 1e-3, "t0 = {t0}: em {em:.2e}, abs {ab:.2e}");
    }
}

#[test]
fn time_vs_frequency_two_levels_unequal_pulses() {
    // the general routes accept unequal durations and carriers
    let disc = DiscreteLevels::new(
        vec![
            srs_core::polarizability::Level {
                energy: 48.0,
                dipole_sq: 0.6,
            },
            srs_core::polarizability::Level {
                energy: 53.0,
                dipole_sq: 0.3,
            },
        ],
        4.0,
    )
    .unwrap();
    let model = PolarizabilityModel::Discrete(disc.clone());
    let pair = PulsePair::new(
        GaussianPulse::new(1.0, 50.0, 1.0, 0.0, Z).unwrap(),
        GaussianPulse::new(0.8, 51.0, 1.3, 0.9, Z).unwrap(),
    )
    .unwrap();
    let spec = QuadratureSpec::default();
    let grid = TimeGridSpec::default();
    let ft = amplitudes_frequency_domain(&pair, &model, &spec).unwrap();
    let tt = amplitudes_time_domain(&pair, &disc, &grid).unwrap();
    let em = (ft.em - tt.em).norm() / ft.em.norm();
    let ab = (ft.abs - tt.abs).norm() / ft.abs.norm();
    assert!(em < 1e-3 && ab < 1e-3, "em {em:.2e}, abs {ab:.2e}");
}

#[test]
fn w_t_antisymmetry_on_grid_frequency_route() {
    let model = PolarizabilityModel::Lorentzian(
        srs_core::polarizability::ResonantLorentzian::new(50.0, 1.0, 10.0).unwrap(),
    );
    let spec = QuadratureSpec::default();
    for k in 1..=8 {
        let dt = 0.4 * k as f64;
        let plus = w_t_frequency(&matched_pair(1.0, 1.0, 50.0, 1.0, dt), &model, &spec)
            .unwrap()
            .value;
        let minus = w_t_frequency(&matched_pair(1.0, 1.0, 50.0, 1.0, -dt), &model, &spec)
            .unwrap()
            .value;
        assert!(
            (plus + minus).abs() <= 1e-9 * plus.abs().max(1e-300),
            "dt = {dt}"
        );
    }
}

#[test]
fn continuum_formula_vs_quadrature() {
    // E_b tau = 100, x = 1.5: the linearized closed form tracks the full
    // spectral quadrature to well under 2%
    let tau = 1000.0;
    let e_b = 100.0 / tau;
    let x = 1.5;
    let w0 = x * e_b;
    let delta = DeltaPotential::new(e_b).unwrap();
    let model = PolarizabilityModel::Delta(delta);
    let spec = QuadratureSpec::default();
    for t0 in [0.5, 1.0, 2.0] {
        let pair = matched_pair(1e-4, 1e-4, w0, tau, t0 * tau);
        let full = w_t_frequency(&pair, &model, &spec).unwrap();
        let closed = w_t_continuum(&pair, &delta).unwrap();
        assert!(full.converged);
        let rel = (full.value - closed).abs() / closed.abs();
        assert!(rel < 0.02, "t0 = {t0}: rel deviation {rel:.4}");
    }
}

#[test]
fn continuum_sign_flips_with_delay_in_quadrature_route() {
    // the spectral route confirms the sign of the analytic weight: for the
    // delta-potential atom just above threshold the delayed probe loses
    let tau = 1000.0;
    let e_b = 0.1;
    let w0 = 1.2 * e_b;
    let model = PolarizabilityModel::Delta(DeltaPotential::new(e_b).unwrap());
    let spec = QuadratureSpec::default();
    let delayed = w_t_frequency(&matched_pair(1e-4, 1e-4, w0, tau, tau), &model, &spec).unwrap();
    let advanced =
        w_t_frequency(&matched_pair(1e-4, 1e-4, w0, tau, -tau), &model, &spec).unwrap();
    assert!(delayed.value < 0.0);
    assert!(advanced.value > 0.0);
}

use jpa_core::characterization::*;
use jpa_core::convergence::converge_dim;
use jpa_core::dpa::{self, DpaParams};
use jpa_core::models::JpaModel;
use jpa_core::outfield::StationaryCavity;
use jpa_core::Complex64;
use nalgebra::Matrix2;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Ideal lossless DPA on resonance: the quadrature at angle φ/2 + π/4 of the
/// pump phase φ is amplified by (κ/2 + |λ|)/(κ/2 − |λ|).
fn dpa_amplitude_gains(lam: f64) -> (f64, f64) {
    ((0.5 + lam) / (0.5 - lam), (0.5 - lam) / (0.5 + lam))
}

#[test]
fn ideal_dpa_gain_matrix_is_diagonal_for_imaginary_pump() {
    let lam = 0.425;
    let model = JpaModel::dpa(0.0, c(0.0, lam), 1.0, 0.0).unwrap();
    let cav = StationaryCavity::new(&model, 40).unwrap();
    let g = gain_matrix_linear_response(&cav).unwrap();
    let (gx, gp) = dpa_amplitude_gains(lam);
    assert!((g.g(1, 1) - gx).abs() < 1e-3 * gx, "{}", g.g(1, 1));
    assert!((g.g(2, 2) - gp).abs() < 1e-3 * gp, "{}", g.g(2, 2));
    assert!(g.g(1, 2).abs() < 1e-6 && g.g(2, 1).abs() < 1e-6);
    let p = DpaParams::from_model(&model).unwrap();
    let closed = dpa::phase_preserving_gain(&p, 0.0);
    assert!((g.phase_preserving_gain() - closed).abs() < 1e-3 * closed);

    // a real pump rotates the amplified axis by π/4
    let real = JpaModel::dpa(0.0, c(lam, 0.0), 1.0, 0.0).unwrap();
    let gr = gain_matrix_linear_response(&StationaryCavity::new(&real, 40).unwrap()).unwrap();
    let (tm, _) = optimal_phases(&gr, 720).unwrap();
    assert!((tm - 3.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-3, "θ_m = {tm}");
    assert!((gr.phase_sensitive_amplitude() - gx).abs() < 1e-3 * gx);
}

#[test]
fn probe_and_linear_response_gain_agree() {
    for model in [
        JpaModel::dpa(0.1, c(0.2, 0.3), 1.0, 0.05).unwrap(),
        JpaModel::bi_current(0.0, c(0.35, 0.0), -0.01, 1.0, 0.0, 50.0).unwrap(),
    ] {
        let rep = gain_matrix(&model, 40, None).unwrap();
        let lr = gain_matrix_linear_response(&StationaryCavity::new(&model, 40).unwrap()).unwrap();
        assert!(rep.nonlinearity < 0.01);
        assert!((rep.matrix.0 - lr.0).abs().max() < 1e-4 * lr.0.abs().max(), "{:?} vs {:?}", rep.matrix.0, lr.0);
    }
}

#[test]
fn ideal_dpa_is_quantum_limited() {
    // G̃ from 1 to 100
    for r in [0.0, 0.2, 0.5, 0.7, 0.8, 0.85, 0.9] {
        let model = JpaModel::dpa(0.0, c(0.0, 0.5 * r), 1.0, 0.0).unwrap();
        let conv = converge_dim(16, 256, 1e-6, |d| {
            let m = metrology(&StationaryCavity::new(&model, d)?)?;
            Ok(vec![m.gain_pp, m.eta_pp])
        })
        .unwrap();
        let cav = StationaryCavity::new(&model, conv.dim).unwrap();
        let met = metrology(&cav).unwrap();
        let g = met.gain_pp;
        assert!((met.eta_pp - g / (2.0 * g - 1.0)).abs() < 1e-3, "r {r}: {} vs {}", met.eta_pp, g / (2.0 * g - 1.0));
        // noiseless phase-sensitive amplification
        assert!(met.noise.sigma_a.abs().max() < 5e-4, "r {r}: {:?}", met.noise.sigma_a);
        for k in 0..16 {
            let theta = k as f64 * std::f64::consts::PI / 16.0;
            assert!((met.eta_theta(theta) - 1.0).abs() < 1e-3);
        }
    }
}

#[test]
fn kerr_amplifier_falls_below_quantum_limit() {
    let tpl = JpaModel::bi_current(0.0, c(0.3, 0.0), -1e-2, 1.0, 0.0, 100.0).unwrap();
    let model = lambda_for_numeric_gain(&tpl, 20.0, GainKind::PhasePreserving, 60).unwrap();
    let met = metrology(&StationaryCavity::new(&model, 60).unwrap()).unwrap();
    assert!((10.0 * met.gain_pp.log10() - 20.0).abs() < 1e-5);
    let limit = met.gain_pp / (2.0 * met.gain_pp - 1.0);
    assert!(met.eta_pp < limit - 1e-3, "{} vs {limit}", met.eta_pp);
    // the gain matrix is no longer symmetric
    assert!((met.gain.g(1, 2) - met.gain.g(2, 1)).abs() > 1e-2);
    let s = met.noise.sigma_a;
    assert!(added_noise_bound(&met.gain) <= s.determinant());
}

#[test]
fn minimal_cross_gain_phase_tracks_best_efficiency() {
    let tpl = JpaModel::bi_current(0.0, c(0.3, 0.0), -1e-2, 1.0, 0.0, 100.0).unwrap();
    let model = lambda_for_numeric_gain(&tpl, 25.0, GainKind::PhaseSensitive, 60).unwrap();
    let met = metrology(&StationaryCavity::new(&model, 60).unwrap()).unwrap();
    let (tm, to) = optimal_phases(&met.gain, 720).unwrap();
    let te = best_eta_phase(&met.noise.sigma_a, 720);
    assert!((tm - to).abs() < 0.25);
    assert!((te - to).abs() < 0.02, "{te} vs {to}");
    assert!(met.eta_theta(to) > 0.9 && met.eta_theta(tm) < 0.1);
}

#[test]
fn mono_current_is_rejected_by_metrology() {
    let mono = JpaModel::mono_current(0.0, c(0.3, 0.0), -1e-3, 1.0, 0.0).unwrap();
    assert!(quantum_efficiency_pp(&mono, 20).is_err());
    assert!(lambda_for_numeric_gain(&mono, 10.0, GainKind::PhasePreserving, 20).is_err());
}

#[test]
fn deviation_hierarchy_between_pump_schemes() {
    let lam = c(0.425, 0.0);
    let mut last = 0.0;
    for kerr in [-1e-3, -3e-3, -1e-2] {
        let mono = JpaModel::mono_current(0.0, lam, kerr, 1.0, 0.0).unwrap();
        let bi = JpaModel::bi_current(0.0, lam, kerr, 1.0, 0.0, 100.0).unwrap();
        let flux = JpaModel::flux(0.0, lam, kerr, 1.0, 0.0).unwrap();
        let cm = StationaryCavity::new(&mono, 50).unwrap();
        let cb = StationaryCavity::new(&bi, 50).unwrap();
        let xm = dpa_deviation(cm.rho());
        let xb = dpa_deviation(cb.rho());
        let xf = dpa_deviation(StationaryCavity::new(&flux, 50).unwrap().rho());
        assert!(xm > 10.0 * xb, "Λ {kerr}: {xm} vs {xb}");
        assert!((xb - xf).abs() < 1e-10);
        assert!(xb > last);
        last = xb;
        assert!(induced_displacement_ratio(&bi, cb.rho()) < 1e-8);
        assert!(induced_displacement_ratio(&mono, cm.rho()) > 1e-3);
    }
    let ideal = JpaModel::dpa(0.0, lam, 1.0, 0.0).unwrap();
    assert!(dpa_deviation(StationaryCavity::new(&ideal, 50).unwrap().rho()).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn added_noise_respects_amplification_bound(
        r in 0.1f64..0.8,
        phase in 0.0..std::f64::consts::TAU,
        kerr in -0.02f64..-1e-4,
        gamma in 0.0f64..0.2,
        detuning in -0.1f64..0.1,
    ) {
        let kt = 1.0 + gamma;
        let pump = Complex64::from_polar(r * 0.5 * kt, phase);
        let model = JpaModel::bi_current(detuning, pump, kerr, 1.0, gamma, 40.0).unwrap();
        let met = metrology(&StationaryCavity::new(&model, 30).unwrap()).unwrap();
        let bound = added_noise_bound(&met.gain);
        let s = met.noise.sigma_a;
        prop_assert!(s.determinant() >= bound - 1e-8, "{} < {bound}", s.determinant());
        let r = rotation(phase);
        let sr = r.transpose() * s * r;
        prop_assert!(sr[(0, 0)] * sr[(1, 1)] >= bound - 1e-8);
        prop_assert!(met.eta_pp <= met.gain_pp / (2.0 * met.gain_pp - 1.0) + 1e-9);
        prop_assert!((s - s.transpose()).abs().max() < 1e-10 * (1.0 + s.abs().max()));
    }
}

#[test]
fn covariance_of_vacuum_is_half_identity() {
    assert_eq!(covariance_from_moments(0.0, c(0.0, 0.0)), Matrix2::identity() * 0.5);
    let n = added_noise(&GainMatrix(Matrix2::identity()), &(Matrix2::identity() * 0.5)).unwrap();
    assert!(n.sigma_a.abs().max() < 1e-15);
    assert!(added_noise(&GainMatrix(Matrix2::zeros()), &Matrix2::identity()).is_err());
}

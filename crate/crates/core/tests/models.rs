use std::f64::consts::FRAC_PI_4;

use jpa_core::models::*;
use jpa_core::{annihilation, Complex64};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn maxabs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn ladder(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |i, j| if i + 1 == j { c((j as f64).sqrt(), 0.0) } else { c(0.0, 0.0) })
}

#[test]
fn bichromatic_hamiltonian_by_hand() {
    let (lam, kerr) = (c(0.2, 0.0), -0.05);
    let m = JpaModel::bi_current(0.0, lam, kerr, 1.0, 0.0, 50.0).unwrap();
    let h = build_hamiltonian(&m, 4).unwrap();
    let a = ladder(4);
    let ad = a.adjoint();
    let want = (&ad * &ad) * (lam * 0.5) + (&a * &a) * (lam.conj() * 0.5) + (&ad * &ad * &a * &a) * c(kerr, 0.0);
    assert!(maxabs(&(h.matrix() - want)) < 1e-14);
}

#[test]
fn mono_minus_bi_is_the_cubic_term() {
    let (lam, kerr) = (c(0.3, 0.1), -0.02);
    let mono = JpaModel::mono_current(0.1, lam, kerr, 1.0, 0.0).unwrap();
    let bi = JpaModel::bi_current(0.1, lam, kerr, 1.0, 0.0, 60.0).unwrap();
    let dim = 12;
    let diff = build_hamiltonian(&mono, dim).unwrap().into_matrix() - build_hamiltonian(&bi, dim).unwrap().into_matrix();
    let a = annihilation(dim).unwrap().into_matrix();
    let ad = a.adjoint();
    let mu = mono.cubic_coefficient();
    // μ = 2αΛ with α² = λ/(2Λ)
    let alpha = match mono.pump_data {
        PumpData::MonoCurrent { alpha } => alpha,
        _ => unreachable!(),
    };
    assert!((alpha * alpha * (2.0 * kerr) - lam).norm() < 1e-14);
    assert!((mu - alpha * (2.0 * kerr)).norm() < 1e-14);
    let want = (&ad * &ad * &a) * mu + (&ad * &a * &a) * mu.conj();
    assert!(maxabs(&(diff - want)) < 1e-13);
}

#[test]
fn flux_leading_equals_bichromatic() {
    let (lam, kerr) = (c(-0.2, 0.25), -0.01);
    let flux = JpaModel::flux(0.05, lam, kerr, 1.0, 0.1).unwrap();
    let bi = JpaModel::bi_current(0.05, lam, kerr, 1.0, 0.1, 60.0).unwrap();
    assert_eq!(build_hamiltonian(&flux, 20).unwrap(), build_hamiltonian(&bi, 20).unwrap());
}

fn resonant_flux_circuit(q: f64, static_flux: f64, flux_amp: f64, leading_only: bool) -> JpaModel {
    let cp = CircuitParams::new(2.0e4, 1.0).unwrap().with_flux(static_flux, flux_amp).unwrap();
    let kp = circuit_to_kerr(&cp);
    // pick ω_p so that the pumped, renormalized resonance sits at ω_p/2
    let shifted = kp.omega0 * libm::j0(flux_amp).sqrt();
    let kerr_f = -flux_fourier_coefficients(cp.ej, static_flux, flux_amp, 2).unwrap()[0] * kp.phi_zpf.powi(4) / 4.0;
    let omega_p = 2.0 * (shifted - 2.0 * kerr_f);
    let kappa = kp.omega0 / q;
    JpaModel::flux_from_circuit(&cp, omega_p, kappa, 0.0, leading_only).unwrap()
}

#[test]
fn flux_pump_strength_relative_to_threshold() {
    let (q, f, df) = (50.0, FRAC_PI_4, 0.005);
    let m = resonant_flux_circuit(q, f, df, true);
    assert!(m.detuning.abs() < 1e-9 * m.kappa);
    // |λ_f/λ_crit| = δf Q tan F / 2 to leading order in δf
    let want = 0.5 * df * q * f.tan();
    assert!((m.pump_ratio() - want).abs() < 0.01 * want, "{} vs {want}", m.pump_ratio());

    let (lam, shift) = effective_pump_and_shift(&m);
    assert!((lam - m.pump).norm() < 1e-12 * lam.norm());
    assert!(shift < 0.0);
    // λ_f in Kerr form: 4Λ_f E^(1)/ω₀ = −J₀(δf) λ_f
    let cp = CircuitParams::new(2.0e4, 1.0).unwrap().with_flux(f, df).unwrap();
    let kp = circuit_to_kerr(&cp);
    let e1 = flux_fourier_coefficients(cp.ej, f, df, 2).unwrap()[1];
    assert!((4.0 * m.kerr * e1 / kp.omega0 + libm::j0(df) * lam.re).abs() < 1e-12 * lam.norm());
}

#[test]
fn full_flux_hamiltonian_adds_higher_harmonics() {
    let full = resonant_flux_circuit(50.0, FRAC_PI_4, 0.005, false);
    let lead = resonant_flux_circuit(50.0, FRAC_PI_4, 0.005, true);
    let terms = match full.pump_data {
        PumpData::Flux { terms: Some(t), .. } => t,
        _ => unreachable!(),
    };
    let dim = 10;
    let diff = build_hamiltonian(&full, dim).unwrap().into_matrix() - build_hamiltonian(&lead, dim).unwrap().into_matrix();
    let a = annihilation(dim).unwrap().into_matrix();
    let ad = a.adjoint();
    let a3 = &a * &a * &a;
    let ad3 = &ad * &ad * &ad;
    let want = (&ad * &a3 + &ad3 * &a) * c(-terms.cubic_coeff, 0.0) + (&a3 * &a + &ad3 * &ad) * c(-terms.quartic_coeff, 0.0);
    assert!(maxabs(&(&diff - &want)) < 1e-12 * maxabs(&want));
}

#[test]
fn flux_series_resums_the_cosine() {
    let (ej, f, df) = (1.3, 0.4, 0.3);
    let e = flux_fourier_coefficients(ej, f, df, 12).unwrap();
    for k in 0..20 {
        let t = 0.37 * k as f64;
        let sum: f64 = e.iter().enumerate().map(|(n, en)| en * (n as f64 * t).cos()).sum();
        assert!((sum - ej * (f + df * t.cos()).cos()).abs() < 1e-10);
    }
}

/// |α|² from the population cubic by bisection; the cubic is increasing in n
/// for zero detuning.
fn mono_population(eps: f64, kerr: f64, kappa: f64) -> f64 {
    let p = |n: f64| 4.0 * kerr * kerr * n.powi(3) + 0.25 * kappa * kappa * n - eps * eps;
    let (mut lo, mut hi) = (0.0, 1e6);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn mono_field_matches_population_cubic() {
    let (kerr, kappa, eps) = (-0.01, 1.0, 0.5);
    let alpha = classical_field_mono(c(eps, 0.0), 0.0, kerr, kappa).unwrap();
    assert!((alpha.norm_sqr() - mono_population(eps, kerr, kappa)).abs() < 1e-10);
    let residual = c(eps, 0.0) + (c(2.0 * kerr * alpha.norm_sqr(), 0.0) - c(0.0, 0.5 * kappa)) * alpha;
    assert!(residual.norm() < 1e-10);
}

#[test]
fn mirror_detuned_bichromatic_fields() {
    let kp = KerrParams::new(100.0, 0.05, -0.02);
    let kappa = 1.0;
    // equal populations n require mirror symmetry about the pulled resonance
    // ω̃₀ + 6Λn, where each field sees detuning ∓δ
    let (n, delta) = (2.0, 3.0);
    let center = kp.omega0_tilde + 6.0 * kp.kerr * n;
    let eps = (n * (delta * delta + 0.25 * kappa * kappa)).sqrt();
    let (a1, a2) = classical_fields_bi(c(eps, 0.0), c(eps, 0.0), center + delta, center - delta, &kp, kappa).unwrap();
    assert!((a1.norm() - a2.norm()).abs() < 1e-8);
    assert!((a1.norm_sqr() - n).abs() < 1e-8);

    // without Kerr the bare resonance is the mirror point
    let lin = KerrParams::new(100.0, 0.05, 0.0);
    let (b1, b2) = classical_fields_bi(c(eps, 0.0), c(eps, 0.0), lin.omega0_tilde + delta, lin.omega0_tilde - delta, &lin, kappa).unwrap();
    assert!((b1.norm() - b2.norm()).abs() < 1e-12);
    let (z1, z2) = classical_fields_bi(c(0.0, 0.0), c(0.0, 0.0), 101.0, 99.0, &kp, kappa).unwrap();
    assert_eq!((z1.norm(), z2.norm()), (0.0, 0.0));
}

#[test]
fn bichromatic_model_from_drives() {
    let kp = KerrParams::new(100.0, 0.05, -0.01);
    let m = JpaModel::bi_from_drives(&kp, c(0.8, 0.0), c(0.8, 0.0), 103.0, 97.5, 1.0, 0.0).unwrap();
    let (lam, shift) = effective_pump_and_shift(&m);
    assert!((lam - m.pump).norm() < 1e-15);
    assert!(shift < 0.0);
    assert!(m.rwa_valid());
}

proptest! {
    #[test]
    fn hamiltonians_are_hermitian(
        re in -0.3f64..0.3, im in -0.3f64..0.3, det in -0.5f64..0.5,
        kerr in -0.05f64..0.0, scheme in 0usize..4,
    ) {
        let lam = c(re, im);
        let m = match scheme {
            0 => JpaModel::dpa(det, lam, 1.0, 0.0),
            1 => JpaModel::mono_current(det, lam, kerr, 1.0, 0.0),
            2 => JpaModel::bi_current(det, lam, kerr, 1.0, 0.0, 30.0),
            _ => JpaModel::flux(det, lam, kerr, 1.0, 0.0),
        }.unwrap();
        let h = build_hamiltonian(&m, 9).unwrap();
        prop_assert!(maxabs(&(h.matrix() - h.matrix().adjoint())) < 1e-14);
        let (_, shift) = effective_pump_and_shift(&m);
        prop_assert!(shift <= 0.0);
    }

    #[test]
    fn mono_field_satisfies_its_equation(
        eps_re in -1.0f64..1.0, eps_im in -1.0f64..1.0, kerr in -0.02f64..0.0, det in -0.2f64..0.2,
    ) {
        let eps = c(eps_re, eps_im);
        if let Ok(alpha) = classical_field_mono(eps, det, kerr, 1.0) {
            let r = eps + (c(det + 2.0 * kerr * alpha.norm_sqr(), 0.0) - c(0.0, 0.5)) * alpha;
            prop_assert!(r.norm() < 1e-10);
        }
    }
}

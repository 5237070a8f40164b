use jpa_core::dpa::{self, DpaParams};
use jpa_core::filter::FilterSpec;
use jpa_core::models::JpaModel;
use jpa_core::ode::Tolerances;
use jpa_core::outfield::{squeezing_level, MomentSet, StationaryCavity};
use jpa_core::{annihilation, Complex64};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-12)
}

#[test]
fn dpa_spectra_match_closed_form() {
    for (delta, lambda, gamma) in [(0.0, c(0.3, 0.0), 0.0), (0.35, c(0.1, -0.25), 0.1)] {
        let model = JpaModel::dpa(delta, lambda, 1.0, gamma).unwrap();
        let cav = StationaryCavity::new(&model, 40).unwrap();
        let p = DpaParams::from_model(&model).unwrap();
        for w in [-3.0, -1.1, -0.2, 0.0, 0.4, 1.7, 3.0] {
            let (n, m) = cav.output_spectra(w).unwrap();
            let (n0, m0) = dpa::output_spectra(&p, w);
            assert!((n - n0).abs() < 1e-3 * n0, "N({w}) {n} vs {n0}");
            assert!(rel(m, m0) < 1e-3, "M({w}) {m} vs {m0}");
            assert!(n > -1e-6);
        }
    }
}

#[test]
fn steady_state_matches_intracavity_moments() {
    let model = JpaModel::dpa(0.2, c(0.0, 0.4), 1.0, 0.05).unwrap();
    let cav = StationaryCavity::new(&model, 50).unwrap();
    let (n, m, mean) = cav.rho().centered_moments();
    let (n0, m0) = dpa::intracavity_moments(&DpaParams::from_model(&model).unwrap());
    assert!(mean.norm() < 1e-10);
    assert!((n - n0).abs() < 1e-4 * n0);
    assert!(rel(m, m0) < 1e-4);
}

#[test]
fn filtered_dpa_moments_match_frequency_domain() {
    // κ/2π = 50 MHz and a 256 ns boxcar, in units of μs
    let kappa = 2.0 * std::f64::consts::PI * 50.0;
    for (lam, filter) in [
        (0.3, FilterSpec::boxcar(0.256).unwrap()),
        (0.425, FilterSpec::boxcar(0.256).unwrap()),
        (0.3, FilterSpec::gaussian(4.0).unwrap()),
    ] {
        let model = JpaModel::dpa(0.0, c(lam * kappa, 0.0), kappa, 0.0).unwrap();
        let cav = StationaryCavity::new(&model, 64).unwrap();
        let ms = cav.filtered_moments(&filter, 2, Tolerances { abs: 1e-11, rel: 1e-9 }).unwrap();
        let oracle = dpa::filtered_moments(&DpaParams::from_model(&model).unwrap(), &filter).unwrap();
        let n = ms.centered_n().unwrap();
        let m = ms.centered_m().unwrap();
        assert!((n - oracle.n).abs() < 1e-3 * oracle.n, "N_f {n} vs {}", oracle.n);
        assert!(rel(m, oracle.m) < 1e-3, "M_f {m} vs {}", oracle.m);
        assert!((ms.commutator - 1.0).abs() < 2e-2);
        let s = ms.squeezing_level().unwrap();
        let s0 = squeezing_level(oracle.n, oracle.m).unwrap();
        assert!((s - s0).abs() < 1e-3 * s0, "S {s} vs {s0}; N {n} vs {}; M {m} vs {}", oracle.n, oracle.m);
    }
}

#[test]
fn boxcar_and_gaussian_of_equal_bandwidth_agree() {
    let model = JpaModel::dpa(0.0, c(0.2, 0.0), 1.0, 0.0).unwrap();
    let cav = StationaryCavity::new(&model, 30).unwrap();
    // near κT ~ 1 the shapes see nearly the same noise; for κT ≫ 1 the boxcar
    // sidelobes pick up anti-squeezed noise and the two drift far apart
    let t = 2.0;
    let sb = cav.filtered_moments(&FilterSpec::boxcar(t).unwrap(), 2, Tolerances::default()).unwrap().squeezing_level().unwrap();
    let sg = cav
        .filtered_moments(&FilterSpec::gaussian(1.0 / t).unwrap(), 2, Tolerances::default())
        .unwrap()
        .squeezing_level()
        .unwrap();
    assert!((sb - sg).abs() < 0.1 * sb, "{sb} vs {sg}");
}

#[test]
fn two_time_correlator_symmetries() {
    let model = JpaModel::dpa(0.1, c(0.3, 0.1), 1.0, 0.0).unwrap();
    let cav = StationaryCavity::new(&model, 30).unwrap();
    let a = annihilation(30).unwrap().into_matrix();
    let ad = a.adjoint();
    let taus: Vec<f64> = (0..=40).map(|i| 0.3 * i as f64).collect();
    let corr = cav.two_time_correlator(&ad, &a, &taus).unwrap();
    let (n0, _) = dpa::intracavity_moments(&DpaParams::from_model(&model).unwrap());
    assert!((corr[0].re - n0).abs() < 1e-4 * n0 && corr[0].im.abs() < 1e-8);
    // slowest decay rate of the correlator is κ/2 − |λ|
    let slow = 0.5 - (0.1f64.powi(2) + 0.3f64.powi(2)).sqrt().min(0.5);
    assert!(corr[40].norm() < 1.5 * n0 * (-slow * 12.0).exp());
    // ⟨a†(t₁)a(t₂)⟩ = conj ⟨a†(t₂)a(t₁)⟩
    for (t1, t2) in [(0.0, 0.7), (1.3, 0.2), (0.5, 2.5)] {
        let x = cav.output_correlator(&[t1], &[t2]).unwrap();
        let y = cav.output_correlator(&[t2], &[t1]).unwrap();
        assert!((x - y.conj()).norm() < 1e-9);
    }
    assert!(cav.two_time_correlator(&ad, &a, &[0.0, 1.0]).is_err());

    let vac = StationaryCavity::new(&JpaModel::dpa(0.0, c(0.0, 0.0), 1.0, 0.0).unwrap(), 6).unwrap();
    let a6 = annihilation(6).unwrap().into_matrix();
    for v in vac.two_time_correlator(&a6.adjoint(), &a6, &taus).unwrap() {
        assert!(v.norm() < 1e-15);
    }
}

/// ⟨D†ᵖD^q⟩ by a tensor-product trapezoid over the boxcar support [−T, 0],
/// evaluating every time ordering through the explicit correlator.
fn nested_trapezoid(cav: &StationaryCavity, t: f64, p: usize, q: usize, nodes: usize) -> Complex64 {
    let h = t / (nodes - 1) as f64;
    let k = p + q;
    let f = 1.0 / t.sqrt();
    let mut idx = vec![0usize; k];
    let mut acc = c(0.0, 0.0);
    loop {
        let times: Vec<f64> = idx.iter().map(|&i| -t + i as f64 * h).collect();
        let w: f64 = idx.iter().map(|&i| if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 }).product();
        acc += cav.output_correlator(&times[..p], &times[p..]).unwrap() * w;
        let mut d = 0;
        loop {
            if d == k {
                return acc * (h * f).powi(k as i32);
            }
            idx[d] += 1;
            if idx[d] < nodes {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

#[test]
fn source_hierarchy_matches_explicit_orderings() {
    let model = JpaModel::mono_current(0.1, c(0.25, 0.0), -0.05, 1.0, 0.0).unwrap();
    let cav = StationaryCavity::new(&model, 10).unwrap();
    let t = 2.0;
    let ms = cav.filtered_moments(&FilterSpec::boxcar(t).unwrap(), 3, Tolerances { abs: 1e-12, rel: 1e-10 }).unwrap();
    for ((p, q), nodes) in [((0, 1), 81), ((1, 1), 41), ((0, 2), 41), ((1, 2), 17)] {
        let want = nested_trapezoid(&cav, t, p, q, nodes);
        let got = ms.get(p, q).unwrap();
        let tol = if p + q == 3 { 1e-2 } else { 2e-3 };
        assert!(rel(got, want) < tol, "({p},{q}) {got} vs {want}");
    }
}

#[test]
fn quartic_models_have_vanishing_odd_moments() {
    let model = JpaModel::bi_current(0.0, c(0.3, 0.0), -0.01, 1.0, 0.0, 3.0).unwrap();
    let cav = StationaryCavity::new(&model, 24).unwrap();
    let ms = cav.filtered_moments(&FilterSpec::boxcar(3.0).unwrap(), 4, Tolerances::default()).unwrap();
    for (&(p, q), v) in &ms.moments {
        if (p + q) % 2 == 1 {
            assert!(v.norm() < 1e-8, "({p},{q}) = {v}");
        }
    }
    let n = ms.centered_n().unwrap();
    let m = ms.centered_m().unwrap();
    assert!(n >= -1e-6 && m.norm() <= (n * (n + 1.0)).sqrt() + 1e-6);
    assert!((ms.commutator - 1.0).abs() < 2e-2);
}

#[test]
fn moment_set_accessors() {
    let ms = MomentSet::from_normal_ordered(2, &[((0, 1), c(0.5, 0.0)), ((1, 1), c(1.25, 0.0)), ((0, 2), c(0.75, 0.0))]);
    assert_eq!(ms.get(1, 0).unwrap(), c(0.5, 0.0));
    assert!((ms.centered_n().unwrap() - 1.0).abs() < 1e-15);
    assert!((ms.centered_m().unwrap() - c(0.5, 0.0)).norm() < 1e-15);
    assert!(ms.get(3, 0).is_err());
}

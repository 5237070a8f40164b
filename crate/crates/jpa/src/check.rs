//! Quick self-tests of a build against closed forms. Each takes well under
//! a second in release mode.

use jpa_core::characterization::metrology;
use jpa_core::dpa::{self, DpaParams};
use jpa_core::filter::FilterSpec;
use jpa_core::models::JpaModel;
use jpa_core::ode::Tolerances;
use jpa_core::outfield::StationaryCavity;
use jpa_core::recon::{bootstrap_reconstruct, GaussianSignal, HistogramGrid, SynthSpec, ThermalNoise};
use jpa_core::Complex64;

use crate::synth::synthesize_parallel;

pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn dpa_gain() -> jpa_core::Result<(bool, String)> {
    let kappa = 2.0 * std::f64::consts::PI * 50.0;
    let lam = Complex64::new(0.25 * kappa, 0.0);
    let cav = StationaryCavity::new(&JpaModel::dpa(0.0, lam, kappa, 0.0)?, 40)?;
    let got = metrology(&cav)?.gain_pp;
    let want = dpa::phase_preserving_gain(&DpaParams::new(0.0, lam, kappa, 0.0)?, 0.0);
    let rel = (got / want - 1.0).abs();
    Ok((rel < 1e-8, format!("G numeric {got:.10}, closed form {want:.10}")))
}

fn dpa_filtered() -> jpa_core::Result<(bool, String)> {
    let kappa = 2.0 * std::f64::consts::PI * 50.0;
    let lam = Complex64::new(0.3 * kappa, 0.0);
    let filter = FilterSpec::boxcar(0.256)?;
    let cav = StationaryCavity::new(&JpaModel::dpa(0.0, lam, kappa, 0.0)?, 40)?;
    let ms = cav.filtered_moments(&filter, 2, Tolerances::default())?;
    let want = dpa::filtered_moments(&DpaParams::new(0.0, lam, kappa, 0.0)?, &filter)?;
    let dn = (ms.centered_n()? - want.n).abs();
    let dm = (ms.centered_m()? - want.m).norm();
    Ok((dn.max(dm) < 1e-6, format!("|dN| {dn:.2e}, |dM| {dm:.2e}")))
}

fn recon_round_trip() -> jpa_core::Result<(bool, String)> {
    let (n, m) = (0.8, Complex64::new(0.0, 0.9));
    let sig = GaussianSignal::new(Complex64::new(0.0, 0.0), n, m)?;
    let spec = SynthSpec::new(20.0, ThermalNoise::new(2.0)?, 400_000, 7)?;
    let grid = HistogramGrid::covering(&sig, &spec.noise, spec.gain_chain, 96, 7.0)?;
    let (on, off) = synthesize_parallel(&sig, &spec, &grid).map_err(|e| jpa_core::Error::InvalidParameter(e.to_string()))?;
    let rm = bootstrap_reconstruct(&on, &off, spec.gain_chain, 2, 20, 1)?;
    let got_n = rm.moments[&(1, 1)].re;
    let got_m = rm.moments[&(0, 2)];
    let zn = (got_n - n).abs() / rm.errors[&(1, 1)];
    let zm = (got_m - m).norm() / rm.errors[&(0, 2)];
    Ok((zn < 5.0 && zm < 5.0, format!("N {got_n:.4} ({zn:.1} sigma), M {got_m:.4} ({zm:.1} sigma)")))
}

pub fn run_checks() -> Vec<CheckResult> {
    let checks: [(&'static str, fn() -> jpa_core::Result<(bool, String)>); 3] =
        [("dpa_gain", dpa_gain), ("dpa_filtered_moments", dpa_filtered), ("recon_round_trip", recon_round_trip)];
    checks
        .iter()
        .map(|&(name, f)| match f() {
            Ok((passed, detail)) => CheckResult { name, passed, detail },
            Err(e) => CheckResult { name, passed: false, detail: e.to_string() },
        })
        .collect()
}

//! Amplifier metrology on the numerical steady state: gain matrix, added noise
//! and quantum efficiencies at ω = 0.
//!
//! Quadratures are X = (a + a†)/√2 and P = i(a† − a)/√2, so a displacement β
//! has quadrature means √2 (Re β, Im β) and vacuum variances 1/2.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{annihilation, trace_product, CMatrix, DensityMatrix};
use crate::lindblad::{build_liouvillian, steady_state_full};
use crate::models::{build_hamiltonian, JpaModel, Scheme};
use crate::outfield::StationaryCavity;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Real 2×2 map from input to output quadrature displacements.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainMatrix(pub Matrix2<f64>);

impl GainMatrix {
    pub fn g(&self, i: usize, j: usize) -> f64 {
        self.0[(i - 1, j - 1)]
    }

    /// Rᵀ(θ) G R(θ) with R the counter-clockwise rotation.
    pub fn rotated(&self, theta: f64) -> Self {
        let r = rotation(theta);
        Self(r.transpose() * self.0 * r)
    }

    /// G̃ = |g11 + g22 + i(g21 − g12)|²/4.
    pub fn phase_preserving_gain(&self) -> f64 {
        let z = Complex64::new(self.g(1, 1) + self.g(2, 2), self.g(2, 1) - self.g(1, 2));
        0.25 * z.norm_sqr()
    }
}

pub fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = libm::sincos(theta);
    Matrix2::new(c, -s, s, c)
}

pub fn phase_preserving_gain_from_matrix(g: &GainMatrix) -> f64 {
    g.phase_preserving_gain()
}

/// Rejects models whose linear-response gain is not defined about the displaced frame.
pub fn check_metrology_model(model: &JpaModel) -> Result<()> {
    if model.scheme() == Scheme::MonoCurrent {
        return Err(Error::InvalidParameter(
            "metrology is restricted to models without cubic corrections (DPA, bichromatic, flux)".into(),
        ));
    }
    Ok(())
}

/// Input amplitude ⟨a_in⟩ produced by a probe H = εa† + ε*a: √κ⟨a_in⟩ = −iε.
pub fn probe_input_amplitude(eps: Complex64, kappa: f64) -> Complex64 {
    -I * eps / libm::sqrt(kappa)
}

fn assemble(responses: [(Complex64, Complex64); 2]) -> GainMatrix {
    // responses: (⟨a_in⟩, ⟨a_out⟩) for a real and an imaginary input
    let mut g = Matrix2::zeros();
    for (col, (a_in, a_out)) in responses.iter().enumerate() {
        let scale = if col == 0 { a_in.re } else { a_in.im };
        g[(0, col)] = a_out.re / scale;
        g[(1, col)] = a_out.im / scale;
    }
    GainMatrix(g)
}

/// Result of the probe-response measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainReport {
    pub matrix: GainMatrix,
    /// Input amplitude |⟨a_in⟩| that passed the linearity gate.
    pub probe: f64,
    /// Largest relative change between the probe and half the probe.
    pub nonlinearity: f64,
}

/// Gain matrix from two weak probes of orthogonal phase; the unprobed mean
/// field is subtracted. The probe amplitude ε (default κ/1000) is halved until
/// responses at ε and ε/2 agree to 1%.
pub fn gain_matrix(model: &JpaModel, dim: usize, eps_probe: Option<f64>) -> Result<GainReport> {
    check_metrology_model(model)?;
    let kappa = model.kappa;
    let mut eps = eps_probe.unwrap_or(kappa / 1000.0);
    if !(eps > 0.0) || eps > kappa / 100.0 {
        return Err(Error::ProbeTooStrong(eps));
    }
    let h0 = build_hamiltonian(model, dim)?;
    let a = annihilation(dim)?;
    let collapse = [(a.clone(), model.kappa_tot())];
    let base = steady_state_full(&build_liouvillian(&h0, &collapse)?)?;
    let mean0 = trace_product(a.matrix(), base.rho.matrix());
    let respond = |eps_c: Complex64| -> Result<(Complex64, Complex64)> {
        let hp: CMatrix = a.adjoint().matrix() * eps_c + a.matrix() * eps_c.conj();
        let h = crate::fock::FockOperator::hermitian(h0.matrix() + hp)?;
        let ss = steady_state_full(&build_liouvillian(&h, &collapse)?)?;
        let mean = trace_product(a.matrix(), ss.rho.matrix());
        let a_in = probe_input_amplitude(eps_c, kappa);
        Ok((a_in, (mean - mean0) * libm::sqrt(kappa) - a_in))
    };
    let sk = libm::sqrt(kappa);
    for _ in 0..8 {
        // inputs ⟨a_in⟩ = δ and iδ
        let delta = eps / sk;
        let run = |d: f64| -> Result<GainMatrix> {
            Ok(assemble([respond(I * d * sk)?, respond(Complex64::new(-d * sk, 0.0))?]))
        };
        let full = run(delta)?;
        let half = run(0.5 * delta)?;
        let scale = full.0.abs().max();
        let nonlinearity = (full.0 - half.0).abs().max() / scale.max(f64::MIN_POSITIVE);
        if nonlinearity <= 0.01 {
            return Ok(GainReport { matrix: full, probe: delta, nonlinearity });
        }
        eps *= 0.5;
    }
    Err(Error::ProbeTooStrong(eps))
}

/// Gain matrix from the exact first-order response δρ = −L⁻¹(−i[H_p, ρ]).
pub fn gain_matrix_linear_response(cav: &StationaryCavity) -> Result<GainMatrix> {
    let dim = cav.dim();
    let a = annihilation(dim)?.into_matrix();
    let ad = a.adjoint();
    let rho = cav.rho().matrix();
    let sk = libm::sqrt(cav.kappa);
    let mut cols = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 2];
    for (k, a_in) in [Complex64::new(1.0, 0.0), I].into_iter().enumerate() {
        // ε = i√κ⟨a_in⟩
        let eps = I * a_in * sk;
        let hp: CMatrix = &ad * eps + &a * eps.conj();
        let x = (&hp * rho - rho * &hp) * (-I);
        let drho = cav.steady.integrate_decay(&x)?;
        let d_mean = trace_product(&a, &drho);
        cols[k] = (a_in, d_mean * sk - a_in);
    }
    Ok(assemble(cols))
}

/// Symmetrized quadrature covariance matrices at ω = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseMatrices {
    pub sigma_out: Matrix2<f64>,
    pub sigma_in: Matrix2<f64>,
    pub sigma_a: Matrix2<f64>,
}

/// σ for centered moments N = ⟨δa†δa⟩, M = ⟨δa²⟩.
pub fn covariance_from_moments(n: f64, m: Complex64) -> Matrix2<f64> {
    Matrix2::new(n + 0.5 + m.re, m.im, m.im, n + 0.5 - m.re)
}

/// σ_A = G⁻¹ σ_out G⁻ᵀ − σ_in with vacuum σ_in.
pub fn added_noise(g: &GainMatrix, sigma_out: &Matrix2<f64>) -> Result<NoiseMatrices> {
    let inv = g.0.try_inverse().ok_or(Error::Singular)?;
    let sigma_in = Matrix2::identity() * 0.5;
    let sigma_a = inv * sigma_out * inv.transpose() - sigma_in;
    Ok(NoiseMatrices { sigma_out: *sigma_out, sigma_in, sigma_a })
}

/// (1/4)|1 − 1/det G|², the lower bound on det σ_A and hence on σ_A11 σ_A22.
/// For a diagonal gain matrix det G = g11 g22.
pub fn added_noise_bound(g: &GainMatrix) -> f64 {
    let x = 1.0 - 1.0 / g.0.determinant();
    0.25 * x * x
}

/// η(θ) = 1/(1 + 2[Rᵀσ_A R]₁₁).
pub fn eta_theta(sigma_a: &Matrix2<f64>, theta: f64) -> f64 {
    let r = rotation(theta);
    let a = (r.transpose() * sigma_a * r)[(0, 0)];
    1.0 / (1.0 + 2.0 * a)
}

/// Everything the metrology sweeps report for one model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metrology {
    pub gain: GainMatrix,
    /// G̃ from the gain matrix.
    pub gain_pp: f64,
    /// ⟨a_out† a_out⟩ fluctuation spectrum at ω = 0.
    pub n_out: f64,
    pub m_out: Complex64,
    pub eta_pp: f64,
    pub noise: NoiseMatrices,
}

impl Metrology {
    pub fn eta_theta(&self, theta: f64) -> f64 {
        eta_theta(&self.noise.sigma_a, theta)
    }
}

/// Gain, added noise and efficiencies with the exact linear-response gain.
pub fn metrology(cav: &StationaryCavity) -> Result<Metrology> {
    let gain = gain_matrix_linear_response(cav)?;
    metrology_with_gain(cav, gain)
}

pub fn metrology_with_gain(cav: &StationaryCavity, gain: GainMatrix) -> Result<Metrology> {
    let (n_out, m_out) = cav.output_spectra(0.0)?;
    let gain_pp = gain.phase_preserving_gain();
    let added = (n_out + 0.5) / gain_pp - 0.5;
    let eta_pp = 1.0 / (1.0 + 2.0 * added);
    let noise = added_noise(&gain, &covariance_from_moments(n_out, m_out))?;
    Ok(Metrology { gain, gain_pp, n_out, m_out, eta_pp, noise })
}

/// Phase-preserving quantum efficiency of a model.
pub fn quantum_efficiency_pp(model: &JpaModel, dim: usize) -> Result<f64> {
    check_metrology_model(model)?;
    Ok(metrology(&StationaryCavity::new(model, dim)?)?.eta_pp)
}

pub fn added_noise_matrix(model: &JpaModel, dim: usize) -> Result<NoiseMatrices> {
    check_metrology_model(model)?;
    Ok(metrology(&StationaryCavity::new(model, dim)?)?.noise)
}

/// Grid scan over [0, π) followed by golden-section refinement of the best cell.
pub fn maximize_on_half_circle(f: impl Fn(f64) -> f64, grid_n: usize, tol: f64) -> f64 {
    let n = grid_n.max(3);
    let h = PI / n as f64;
    let vals: Vec<f64> = (0..n).map(|i| f(i as f64 * h)).collect();
    let best = (0..n).max_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap_or(0);
    let (mut lo, mut hi) = ((best as f64 - 1.0) * h, (best as f64 + 1.0) * h);
    let phi = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    let x = if f(x) >= vals[best] { x } else { best as f64 * h };
    wrap_half_turn(x)
}

fn wrap_half_turn(x: f64) -> f64 {
    let r = libm::fmod(x, PI);
    if r < 0.0 {
        r + PI
    } else {
        r
    }
}

/// (θ_m, θ_o) in [0, π): θ_m maximizes |G(θ)₁₁|; θ_o minimizes |G(θ)₁₂|.
/// |G(θ)₁₂| generally vanishes twice per half turn, once near the amplified
/// and once near the deamplified quadrature; θ_o is the zero with larger |G(θ)₁₁|.
pub fn optimal_phases(g: &GainMatrix, grid_n: usize) -> Result<(f64, f64)> {
    if grid_n < 360 {
        return Err(Error::InvalidParameter("phase grid needs at least 360 points".into()));
    }
    let theta_m = maximize_on_half_circle(|t| g.rotated(t).g(1, 1).abs(), grid_n, 1e-4);
    let h = PI / grid_n as f64;
    let off = |t: f64| g.rotated(t).g(1, 2).abs();
    let vals: Vec<f64> = (0..grid_n).map(|i| off(i as f64 * h)).collect();
    let mut best: Option<(f64, f64)> = None;
    for i in 0..grid_n {
        let prev = vals[(i + grid_n - 1) % grid_n];
        let next = vals[(i + 1) % grid_n];
        if vals[i] <= prev && vals[i] <= next {
            let t = refine_min(&off, (i as f64 - 1.0) * h, (i as f64 + 1.0) * h, 1e-4);
            let t = wrap_half_turn(t);
            let amp = g.rotated(t).g(1, 1).abs();
            if best.map_or(true, |(_, a)| amp > a) {
                best = Some((t, amp));
            }
        }
    }
    let theta_o = best.map_or(0.0, |(t, _)| t);
    Ok((theta_m, theta_o))
}

fn refine_min(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let phi = 0.5 * (libm::sqrt(5.0) - 1.0);
    while hi - lo > tol {
        let x1 = hi - phi * (hi - lo);
        let x2 = lo + phi * (hi - lo);
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    0.5 * (lo + hi)
}

/// Phase of maximal η(θ).
pub fn best_eta_phase(sigma_a: &Matrix2<f64>, grid_n: usize) -> f64 {
    maximize_on_half_circle(|t| eta_theta(sigma_a, t), grid_n, 1e-4)
}

/// Ξ = 1 − |M|/√(N(N+1/2)) from the centered moments of ρ; 0 when N < 1e-12.
pub fn dpa_deviation(rho: &DensityMatrix) -> f64 {
    let (n, m, _) = rho.centered_moments();
    if n < 1e-12 {
        return 0.0;
    }
    1.0 - m.norm() / libm::sqrt(n * (n + 0.5))
}

/// |⟨a⟩_ss| relative to the classical pump field |α| (α₁ for the bichromatic
/// pump); for the flux pump there is no classical cavity field and |⟨a⟩_ss| is returned.
pub fn induced_displacement_ratio(model: &JpaModel, rho: &DensityMatrix) -> f64 {
    let (_, _, mean) = rho.centered_moments();
    let alpha = match model.pump_data {
        crate::models::PumpData::MonoCurrent { alpha } => alpha.norm(),
        crate::models::PumpData::BiCurrent { alpha1, .. } => alpha1.norm(),
        _ => 1.0,
    };
    if alpha == 0.0 {
        return 0.0;
    }
    mean.norm() / alpha
}

/// Largest real part of the eigenvalues −κ_tot/2 ± √(|λ|² − Δ²) of the linear
/// drift matrix; negative below the parametric threshold.
pub fn linear_stability_margin(detuning: f64, pump_abs: f64, kappa_tot: f64) -> f64 {
    let disc = pump_abs * pump_abs - detuning * detuning;
    let root = if disc > 0.0 { libm::sqrt(disc) } else { 0.0 };
    -0.5 * kappa_tot + root
}

/// Which gain a pump search targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GainKind {
    /// G̃ from the full gain matrix.
    PhasePreserving,
    /// max_θ G(θ)₁₁², the photon-number gain of the best amplified quadrature.
    PhaseSensitive,
}

impl GainKind {
    pub fn of(self, g: &GainMatrix) -> f64 {
        match self {
            Self::PhasePreserving => g.phase_preserving_gain(),
            Self::PhaseSensitive => {
                let g11 = g.phase_sensitive_amplitude();
                g11 * g11
            }
        }
    }
}

impl GainMatrix {
    /// max_θ |G(θ)₁₁|, the largest |eigenvalue| of the symmetric part of G.
    pub fn phase_sensitive_amplitude(&self) -> f64 {
        let s = 0.5 * (self.0 + self.0.transpose());
        let mean = 0.5 * (s[(0, 0)] + s[(1, 1)]);
        let half = libm::hypot(0.5 * (s[(0, 0)] - s[(1, 1)]), s[(0, 1)]);
        (mean + half).abs().max((mean - half).abs())
    }
}

/// |λ| (phase of `template.pump` kept) at which the numerical gain reaches
/// `target_db`, by a bracketed secant search in |λ|/λ_crit ∈ (0, 0.9999].
pub fn lambda_for_numeric_gain(template: &JpaModel, target_db: f64, kind: GainKind, dim: usize) -> Result<JpaModel> {
    check_metrology_model(template)?;
    if !(target_db > 0.0) {
        return Err(Error::InvalidParameter("target gain must be positive in dB".into()));
    }
    let phase = if template.pump.norm() > 0.0 { template.pump / template.pump.norm() } else { Complex64::new(1.0, 0.0) };
    let thr = template.threshold();
    let eval = |r: f64| -> Result<(JpaModel, f64)> {
        let m = template.with_pump(phase * (r * thr))?;
        let cav = StationaryCavity::new(&m, dim)?;
        let g = kind.of(&gain_matrix_linear_response(&cav)?);
        Ok((m, 10.0 * libm::log10(g) - target_db))
    };
    let (mut lo, mut f_lo) = (0.0, -target_db);
    let (mut hi, mut f_hi) = (0.9999, eval(0.9999)?.1);
    if f_hi < 0.0 {
        return Err(Error::InvalidParameter("target gain not reachable below the linear threshold".into()));
    }
    // ideal-DPA guess: amplitude gain (1 + r)/(1 − r)
    let g_amp = libm::pow(10.0, target_db / 20.0);
    let mut r = ((g_amp - 1.0) / (g_amp + 1.0)).clamp(1e-3, 0.9998);
    for _ in 0..80 {
        let (m, f) = eval(r)?;
        if f.abs() < 1e-7 {
            return Ok(m);
        }
        if f < 0.0 {
            lo = r;
            f_lo = f;
        } else {
            hi = r;
            f_hi = f;
        }
        let secant = lo - f_lo * (hi - lo) / (f_hi - f_lo);
        let width = hi - lo;
        r = if secant > lo + 0.01 * width && secant < hi - 0.01 * width { secant } else { 0.5 * (lo + hi) };
        if width < 1e-13 {
            return Ok(m);
        }
    }
    Err(Error::NoConvergence(80))
}

//! Circuit parameters, pumping schemes and their rotating-frame Hamiltonians.
//!
//! All energies and rates share one angular-frequency unit with ħ = 1.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{annihilation, CMatrix, FockOperator};

/// Josephson junction (or SQUID) circuit parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircuitParams {
    pub ej: f64,
    pub ec: f64,
    /// Static flux F of a SQUID, in radians of Φ/2φ₀.
    pub static_flux: Option<f64>,
    /// Flux-pump modulation amplitude δf.
    pub flux_amp: Option<f64>,
}

impl CircuitParams {
    pub fn new(ej: f64, ec: f64) -> Result<Self> {
        if !(ej > 0.0 && ec > 0.0) {
            return Err(Error::InvalidParameter(format!("E_J = {ej}, E_C = {ec} must be positive")));
        }
        Ok(Self { ej, ec, static_flux: None, flux_amp: None })
    }

    pub fn with_flux(self, static_flux: f64, flux_amp: f64) -> Result<Self> {
        if !(flux_amp.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!("flux-pump amplitude {flux_amp} outside |δf| < 1")));
        }
        if !(libm::cos(static_flux) > 0.0) {
            return Err(Error::InvalidParameter(format!("static flux {static_flux} gives cos F ≤ 0")));
        }
        Ok(Self { static_flux: Some(static_flux), flux_amp: Some(flux_amp), ..self })
    }
}

/// Quartic-approximation oscillator parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KerrParams {
    pub omega0: f64,
    pub phi_zpf: f64,
    pub kerr: f64,
    pub omega0_tilde: f64,
}

impl KerrParams {
    pub fn new(omega0: f64, phi_zpf: f64, kerr: f64) -> Self {
        Self { omega0, phi_zpf, kerr, omega0_tilde: omega0 - 2.0 * kerr }
    }
}

/// ω₀ = √(8E_JE_C), φ_zpf = 2√(E_C/ω₀), Λ = −E_C/2. A static flux, when
/// present, replaces E_J by E_J cos F.
pub fn circuit_to_kerr(cp: &CircuitParams) -> KerrParams {
    let ej = cp.ej * cp.static_flux.map_or(1.0, libm::cos);
    let omega0 = libm::sqrt(8.0 * ej * cp.ec);
    let phi = 2.0 * libm::sqrt(cp.ec / omega0);
    KerrParams::new(omega0, phi, -cp.ec / 2.0)
}

/// λ_crit = √(Δ² + κ_tot²/4).
pub fn parametric_threshold(detuning: f64, kappa_tot: f64) -> f64 {
    libm::sqrt(detuning * detuning + 0.25 * kappa_tot * kappa_tot)
}

fn cubic(n: f64, c3: f64, c2: f64, c1: f64, c0: f64) -> f64 {
    ((c3 * n + c2) * n + c1) * n + c0
}

/// Steady state of iα̇ = ε + (δ + 2Λ|α|² − iκ_tot/2)α with δ = ω̃₀ − ω_p.
///
/// The population n = |α|² solves 4Λ²n³ + 4Λδn² + (δ² + κ²/4)n − |ε|² = 0.
/// When that cubic has three positive roots the drive is bistable and no
/// single-valued answer exists.
pub fn classical_field_mono(epsilon: Complex64, detuning: f64, kerr: f64, kappa_tot: f64) -> Result<Complex64> {
    if !(kappa_tot > 0.0) {
        return Err(Error::InvalidParameter(format!("kappa_tot = {kappa_tot} must be positive")));
    }
    let half = Complex64::new(0.0, 0.5 * kappa_tot);
    if epsilon.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if kerr == 0.0 {
        return Ok(-epsilon / (Complex64::new(detuning, 0.0) - half));
    }
    let c3 = 4.0 * kerr * kerr;
    let c2 = 4.0 * kerr * detuning;
    let c1 = detuning * detuning + 0.25 * kappa_tot * kappa_tot;
    let c0 = -epsilon.norm_sqr();
    // turning points of the cubic
    let disc = c2 * c2 - 3.0 * c3 * c1;
    if disc > 0.0 {
        let s = libm::sqrt(disc);
        let n1 = (-c2 - s) / (3.0 * c3);
        let n2 = (-c2 + s) / (3.0 * c3);
        if n2 > 0.0 && cubic(n1.max(0.0), c3, c2, c1, c0) >= 0.0 && cubic(n2, c3, c2, c1, c0) <= 0.0 && n1 > 0.0 {
            return Err(Error::Bifurcation);
        }
    }
    let mut hi = 1.0_f64;
    while cubic(hi, c3, c2, c1, c0) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0_f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cubic(mid, c3, c2, c1, c0) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let mut n = 0.5 * (lo + hi);
    for _ in 0..3 {
        let f = cubic(n, c3, c2, c1, c0);
        let df = (3.0 * c3 * n + 2.0 * c2) * n + c1;
        if df != 0.0 {
            n -= f / df;
        }
    }
    let alpha = -epsilon / (Complex64::new(detuning + 2.0 * kerr * n, 0.0) - half);
    let residual = epsilon + (Complex64::new(detuning + 2.0 * kerr * alpha.norm_sqr(), 0.0) - half) * alpha;
    if residual.norm() > 1e-10 * epsilon.norm().max(1.0) {
        return Err(Error::NoConvergence(200));
    }
    Ok(alpha)
}

/// RWA steady state of the two coupled pump fields,
/// 0 = ε_j + (ω̃₀ − ω_j + 2Λ|α_j|² + 4Λ|α_k|² − iκ_tot/2)α_j,
/// by damped fixed-point iteration.
pub fn classical_fields_bi(
    eps1: Complex64,
    eps2: Complex64,
    omega1: f64,
    omega2: f64,
    kp: &KerrParams,
    kappa_tot: f64,
) -> Result<(Complex64, Complex64)> {
    if omega1 == omega2 {
        return Err(Error::InvalidParameter("bichromatic pumps need distinct frequencies".into()));
    }
    if !(kappa_tot > 0.0) {
        return Err(Error::InvalidParameter(format!("kappa_tot = {kappa_tot} must be positive")));
    }
    let d1 = kp.omega0_tilde - omega1;
    let d2 = kp.omega0_tilde - omega2;
    let lam = kp.kerr;
    let half = Complex64::new(0.0, 0.5 * kappa_tot);
    let map = |a1: Complex64, a2: Complex64| {
        let n1 = a1.norm_sqr();
        let n2 = a2.norm_sqr();
        (
            -eps1 / (Complex64::new(d1 + 2.0 * lam * n1 + 4.0 * lam * n2, 0.0) - half),
            -eps2 / (Complex64::new(d2 + 2.0 * lam * n2 + 4.0 * lam * n1, 0.0) - half),
        )
    };
    let (mut a1, mut a2) = (-eps1 / (Complex64::new(d1, 0.0) - half), -eps2 / (Complex64::new(d2, 0.0) - half));
    for _ in 0..10_000 {
        let (b1, b2) = map(a1, a2);
        let n1 = 0.5 * (a1 + b1);
        let n2 = 0.5 * (a2 + b2);
        let change = (n1 - a1).norm().max((n2 - a2).norm());
        a1 = n1;
        a2 = n2;
        if change <= 1e-12 * a1.norm().max(a2.norm()).max(1.0) {
            return Ok((a1, a2));
        }
    }
    Err(Error::NoConvergence(10_000))
}

/// Fourier coefficients E^(n), n = 0..=n_max, of E_J cos(F + δf cos ω_p t).
pub fn flux_fourier_coefficients(ej: f64, static_flux: f64, flux_amp: f64, n_max: usize) -> Result<Vec<f64>> {
    if n_max < 2 {
        return Err(Error::InvalidParameter(format!("n_max = {n_max} must be at least 2")));
    }
    let (s, c) = (libm::sin(static_flux), libm::cos(static_flux));
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(ej * libm::j0(flux_amp) * c);
    for n in 1..=n_max {
        let k = (n + 1) / 2;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let jn = libm::jn(n as i32, flux_amp);
        let trig = if n % 2 == 1 { s } else { c };
        out.push(2.0 * ej * sign * jn * trig);
    }
    Ok(out)
}

/// Flux-pump data retained when the model is built from circuit parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxTerms {
    pub ej: f64,
    pub static_flux: f64,
    pub flux_amp: f64,
    /// Bare frequency at the static bias, √(8 E_J cos F E_C).
    pub omega0: f64,
    pub phi_zpf: f64,
    /// E^(1) φ⁴/12, coefficient of (a†a³ + a†³a).
    pub cubic_coeff: f64,
    /// E^(2) φ⁴/48, coefficient of (a⁴ + a†⁴).
    pub quartic_coeff: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Dpa,
    MonoCurrent,
    BiCurrent,
    Flux,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Dpa => "dpa",
            Scheme::MonoCurrent => "mono",
            Scheme::BiCurrent => "bi",
            Scheme::Flux => "flux",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dpa" => Ok(Scheme::Dpa),
            "mono" | "monocurrent" | "mono_current" => Ok(Scheme::MonoCurrent),
            "bi" | "bicurrent" | "bi_current" => Ok(Scheme::BiCurrent),
            "flux" => Ok(Scheme::Flux),
            other => Err(Error::InvalidParameter(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Scheme-specific pump data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PumpData {
    Dpa,
    MonoCurrent { alpha: Complex64 },
    BiCurrent { alpha1: Complex64, alpha2: Complex64, delta12: f64 },
    Flux { terms: Option<FluxTerms>, leading_only: bool },
}

/// A pumped cavity in its rotating (and, for current pumps, displaced) frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JpaModel {
    pub pump_data: PumpData,
    /// Kerr coefficient Λ (Λ_f for the flux pump).
    pub kerr: f64,
    pub kappa: f64,
    pub gamma: f64,
    /// Δ, Δ₁, Δ̃₂ or Δ_f depending on the scheme.
    pub detuning: f64,
    /// Effective parametric pump strength λ.
    pub pump: Complex64,
}

impl JpaModel {
    fn checked(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn dpa(detuning: f64, pump: Complex64, kappa: f64, gamma: f64) -> Result<Self> {
        Self { pump_data: PumpData::Dpa, kerr: 0.0, kappa, gamma, detuning, pump }.checked()
    }

    /// Monochromatic current pump specified by its effective parameters; the
    /// classical field follows from λ = 2Λα².
    pub fn mono_current(detuning: f64, pump: Complex64, kerr: f64, kappa: f64, gamma: f64) -> Result<Self> {
        let alpha = if kerr == 0.0 { Complex64::new(0.0, 0.0) } else { (pump / (2.0 * kerr)).sqrt() };
        Self { pump_data: PumpData::MonoCurrent { alpha }, kerr, kappa, gamma, detuning, pump }.checked()
    }

    /// Monochromatic current pump from the drive amplitude and frequency.
    pub fn mono_from_drive(kp: &KerrParams, epsilon: Complex64, omega_p: f64, kappa: f64, gamma: f64) -> Result<Self> {
        let alpha = classical_field_mono(epsilon, kp.omega0_tilde - omega_p, kp.kerr, kappa + gamma)?;
        let detuning = kp.omega0_tilde + 4.0 * kp.kerr * alpha.norm_sqr() - omega_p;
        let pump = alpha * alpha * (2.0 * kp.kerr);
        Self { pump_data: PumpData::MonoCurrent { alpha }, kerr: kp.kerr, kappa, gamma, detuning, pump }.checked()
    }

    /// Bichromatic current pump with symmetric classical fields α₁ = α₂ = √(λ/4Λ).
    pub fn bi_current(detuning: f64, pump: Complex64, kerr: f64, kappa: f64, gamma: f64, delta12: f64) -> Result<Self> {
        let alpha = if kerr == 0.0 { Complex64::new(0.0, 0.0) } else { (pump / (4.0 * kerr)).sqrt() };
        Self {
            pump_data: PumpData::BiCurrent { alpha1: alpha, alpha2: alpha, delta12 },
            kerr,
            kappa,
            gamma,
            detuning,
            pump,
        }
        .checked()
    }

    /// Bichromatic current pump from drive amplitudes and frequencies.
    pub fn bi_from_drives(
        kp: &KerrParams,
        eps1: Complex64,
        eps2: Complex64,
        omega1: f64,
        omega2: f64,
        kappa: f64,
        gamma: f64,
    ) -> Result<Self> {
        let (alpha1, alpha2) = classical_fields_bi(eps1, eps2, omega1, omega2, kp, kappa + gamma)?;
        let center = 0.5 * (omega1 + omega2);
        let detuning = kp.omega0_tilde + 4.0 * kp.kerr * (alpha1.norm_sqr() + alpha2.norm_sqr()) - center;
        let pump = alpha1 * alpha2 * (4.0 * kp.kerr);
        Self {
            pump_data: PumpData::BiCurrent { alpha1, alpha2, delta12: omega1 - omega2 },
            kerr: kp.kerr,
            kappa,
            gamma,
            detuning,
            pump,
        }
        .checked()
    }

    /// Flux pump specified by effective parameters; only the Kerr correction is available.
    pub fn flux(detuning: f64, pump: Complex64, kerr: f64, kappa: f64, gamma: f64) -> Result<Self> {
        Self {
            pump_data: PumpData::Flux { terms: None, leading_only: true },
            kerr,
            kappa,
            gamma,
            detuning,
            pump,
        }
        .checked()
    }

    /// Flux pump from SQUID parameters and pump frequency ω_p ≈ 2ω̃₀.
    pub fn flux_from_circuit(cp: &CircuitParams, omega_p: f64, kappa: f64, gamma: f64, leading_only: bool) -> Result<Self> {
        let (f, df) = match (cp.static_flux, cp.flux_amp) {
            (Some(f), Some(df)) => (f, df),
            _ => return Err(Error::InvalidParameter("flux pump needs static flux and pump amplitude".into())),
        };
        let kp = circuit_to_kerr(cp);
        let phi = kp.phi_zpf;
        let phi2 = phi * phi;
        let phi4 = phi2 * phi2;
        let e = flux_fourier_coefficients(cp.ej, f, df, 2)?;
        let kerr_f = -e[0] * phi4 / 4.0;
        let omega_pumped = kp.omega0 * libm::sqrt(libm::j0(df));
        let detuning = omega_pumped - 2.0 * kerr_f - 0.5 * omega_p;
        let pump = Complex64::new(e[1] * phi2 / 2.0, 0.0);
        let terms = FluxTerms {
            ej: cp.ej,
            static_flux: f,
            flux_amp: df,
            omega0: kp.omega0,
            phi_zpf: phi,
            cubic_coeff: e[1] * phi4 / 12.0,
            quartic_coeff: e[2] * phi4 / 48.0,
        };
        Self {
            pump_data: PumpData::Flux { terms: Some(terms), leading_only },
            kerr: kerr_f,
            kappa,
            gamma,
            detuning,
            pump,
        }
        .checked()
    }

    pub fn scheme(&self) -> Scheme {
        match self.pump_data {
            PumpData::Dpa => Scheme::Dpa,
            PumpData::MonoCurrent { .. } => Scheme::MonoCurrent,
            PumpData::BiCurrent { .. } => Scheme::BiCurrent,
            PumpData::Flux { .. } => Scheme::Flux,
        }
    }

    pub fn kappa_tot(&self) -> f64 {
        self.kappa + self.gamma
    }

    pub fn threshold(&self) -> f64 {
        parametric_threshold(self.detuning, self.kappa_tot())
    }

    /// |λ| / λ_crit.
    pub fn pump_ratio(&self) -> f64 {
        self.pump.norm() / self.threshold()
    }

    /// Cubic coefficient μ = 2αΛ (zero except for the monochromatic current pump).
    pub fn cubic_coefficient(&self) -> Complex64 {
        match self.pump_data {
            PumpData::MonoCurrent { alpha } => alpha * (2.0 * self.kerr),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// |Δ₁₂| ≥ 10·|2λ| for the bichromatic pump; always true otherwise.
    pub fn rwa_valid(&self) -> bool {
        match self.pump_data {
            PumpData::BiCurrent { delta12, .. } => delta12.abs() >= 10.0 * 2.0 * self.pump.norm(),
            _ => true,
        }
    }

    /// Same model with a different effective pump (classical fields rescaled accordingly).
    pub fn with_pump(&self, pump: Complex64) -> Result<Self> {
        let mut m = *self;
        m.pump = pump;
        match &mut m.pump_data {
            PumpData::MonoCurrent { alpha } if m.kerr != 0.0 => *alpha = (pump / (2.0 * m.kerr)).sqrt(),
            PumpData::BiCurrent { alpha1, alpha2, .. } if m.kerr != 0.0 => {
                let ratio = if alpha2.norm() > 0.0 { alpha1.norm() / alpha2.norm() } else { 1.0 };
                let prod = pump / (4.0 * m.kerr);
                let a2 = (prod / ratio).sqrt();
                *alpha1 = a2 * ratio;
                *alpha2 = a2;
            }
            PumpData::Flux { terms: Some(_), .. } => {
                return Err(Error::InvalidParameter("circuit-derived flux model has a fixed pump".into()))
            }
            _ => {}
        }
        m.checked()
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.kerr, self.kappa, self.gamma, self.detuning, self.pump.re, self.pump.im]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("model parameters must be finite".into()));
        }
        if self.kappa < 0.0 {
            return Err(Error::NegativeRate(self.kappa));
        }
        if self.gamma < 0.0 {
            return Err(Error::NegativeRate(self.gamma));
        }
        if !(self.kappa_tot() > 0.0) {
            return Err(Error::InvalidParameter("kappa + gamma must be positive".into()));
        }
        let threshold = self.threshold();
        if self.pump.norm() >= threshold {
            return Err(Error::AboveThreshold { pump: self.pump.norm(), threshold });
        }
        if self.scheme() == Scheme::Dpa && self.kerr != 0.0 {
            return Err(Error::InvalidParameter("the DPA has no Kerr term".into()));
        }
        Ok(())
    }
}

/// Effective parametric pump λ and pump-induced frequency shift of each scheme.
pub fn effective_pump_and_shift(model: &JpaModel) -> (Complex64, f64) {
    let k = model.kerr;
    match model.pump_data {
        PumpData::Dpa => (model.pump, 0.0),
        PumpData::MonoCurrent { alpha } => (alpha * alpha * (2.0 * k), 4.0 * k * alpha.norm_sqr()),
        PumpData::BiCurrent { alpha1, alpha2, .. } => {
            (alpha1 * alpha2 * (4.0 * k), 4.0 * k * (alpha1.norm_sqr() + alpha2.norm_sqr()))
        }
        PumpData::Flux { terms: Some(t), .. } => {
            let e1 = flux_fourier_coefficients(t.ej, t.static_flux, t.flux_amp, 2)
                .map(|e| e[1])
                .unwrap_or(0.0);
            let lam = e1 * t.phi_zpf * t.phi_zpf / 2.0;
            (Complex64::new(lam, 0.0), t.omega0 * (libm::sqrt(libm::j0(t.flux_amp)) - 1.0))
        }
        PumpData::Flux { terms: None, .. } => (model.pump, 0.0),
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Rotating-frame Hamiltonian of the model on a Fock space of dimension `dim`.
pub fn build_hamiltonian(model: &JpaModel, dim: usize) -> Result<FockOperator> {
    model.validate()?;
    if dim < 4 {
        return Err(Error::InvalidDimension { got: dim, min: 4 });
    }
    let a = annihilation(dim)?.into_matrix();
    let ad = a.adjoint();
    let ad2 = &ad * &ad;
    let a2 = &a * &a;
    let mut h: CMatrix = &ad * &a * c(model.detuning);
    h += &ad2 * (model.pump * 0.5) + &a2 * (model.pump.conj() * 0.5);
    let kerr_term = &ad2 * &a2 * c(model.kerr);
    match model.pump_data {
        PumpData::Dpa => {}
        PumpData::MonoCurrent { .. } => {
            let mu = model.cubic_coefficient();
            h += &ad2 * &a * mu + &ad * &a2 * mu.conj();
            h += kerr_term;
        }
        PumpData::BiCurrent { .. } => h += kerr_term,
        PumpData::Flux { terms, leading_only } => {
            h += kerr_term;
            if let (Some(t), false) = (terms, leading_only) {
                let a3 = &a2 * &a;
                let ad3 = &ad2 * &ad;
                h -= (&ad * &a3 + &ad3 * &a) * c(t.cubic_coeff);
                h -= (&a2 * &a2 + &ad2 * &ad2) * c(t.quartic_coeff);
            }
        }
    }
    let herm = FockOperator::hermitian(h);
    assert!(herm.is_ok(), "Hamiltonian assembly produced a non-Hermitian matrix");
    herm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circuit_mapping() {
        let kp = circuit_to_kerr(&CircuitParams::new(2.0, 1.0).unwrap());
        assert!((kp.kerr + 0.5).abs() < 1e-15);
        assert!((kp.omega0 - 4.0).abs() < 1e-15);
        assert!((kp.omega0_tilde - 5.0).abs() < 1e-15);
        let kp = circuit_to_kerr(&CircuitParams::new(1e4, 1.0).unwrap());
        let ratio = kp.kerr.abs() / kp.omega0;
        assert!((ratio - 0.5 / libm::sqrt(8e4)).abs() < 1e-15);
        assert!(ratio > 1e-6 && ratio < 1e-2);
        assert!(CircuitParams::new(0.0, 1.0).is_err());
        assert!(CircuitParams::new(1.0, 1.0).unwrap().with_flux(0.3, 1.2).is_err());
    }

    #[test]
    fn thresholds() {
        assert_eq!(parametric_threshold(0.0, 1.0), 0.5);
        assert_eq!(parametric_threshold(3.0, 8.0), 5.0);
        assert!((parametric_threshold(0.1, 0.2) - 0.02f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mono_field_linear_and_zero() {
        let eps = Complex64::new(0.3, -0.2);
        let a = classical_field_mono(eps, 0.4, 0.0, 1.0).unwrap();
        assert!((a + eps / Complex64::new(0.4, -0.5)).norm() < 1e-15);
        assert_eq!(classical_field_mono(Complex64::new(0.0, 0.0), 0.4, -0.1, 1.0).unwrap().norm(), 0.0);
    }

    #[test]
    fn mono_bistable_regime_rejected() {
        // strongly red-detuned drive on a negative Kerr: three branches
        let r = classical_field_mono(Complex64::new(3.0, 0.0), 3.0, -0.05, 1.0);
        assert_eq!(r, Err(Error::Bifurcation));
    }

    #[test]
    fn bi_fields_decouple_without_kerr() {
        let kp = KerrParams::new(10.0, 0.1, 0.0);
        let (e1, e2) = (Complex64::new(0.2, 0.1), Complex64::new(-0.1, 0.3));
        let (a1, a2) = classical_fields_bi(e1, e2, 12.0, 8.5, &kp, 1.0).unwrap();
        let half = Complex64::new(0.0, 0.5);
        assert!((a1 + e1 / (Complex64::new(kp.omega0_tilde - 12.0, 0.0) - half)).norm() < 1e-12);
        assert!((a2 + e2 / (Complex64::new(kp.omega0_tilde - 8.5, 0.0) - half)).norm() < 1e-12);
    }

    #[test]
    fn flux_coefficients_small_pump() {
        let e = flux_fourier_coefficients(1.0, core::f64::consts::FRAC_PI_4, 0.0, 4).unwrap();
        assert!((e[0] - libm::cos(core::f64::consts::FRAC_PI_4)).abs() < 1e-15);
        assert!(e[1..].iter().all(|&v| v == 0.0));
        let f = core::f64::consts::FRAC_PI_4;
        let e = flux_fourier_coefficients(1.0, f, 0.01, 4).unwrap();
        let approx = -0.01 * libm::sin(f);
        assert!(((e[1] - approx) / approx).abs() < 1e-4);
    }

    #[test]
    fn two_photon_matrix_element() {
        let lam = Complex64::new(0.3, 0.1);
        for m in [
            JpaModel::dpa(0.0, lam, 1.0, 0.0).unwrap(),
            JpaModel::bi_current(0.0, lam, 0.0, 1.0, 0.0, 50.0).unwrap(),
            JpaModel::flux(0.0, lam, 0.0, 1.0, 0.0).unwrap(),
        ] {
            let h = build_hamiltonian(&m, 6).unwrap();
            let want = lam * libm::sqrt(2.0) / 2.0;
            assert!((h.matrix()[(2, 0)] - want).norm() < 1e-15);
        }
    }

    #[test]
    fn above_threshold_rejected() {
        let r = JpaModel::dpa(0.0, Complex64::new(0.6, 0.0), 1.0, 0.0);
        assert!(matches!(r, Err(Error::AboveThreshold { .. })));
    }
}

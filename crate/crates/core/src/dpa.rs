//! Closed-form results for the ideal degenerate parametric amplifier
//! H = Δ a†a + (λ a†² + λ* a²)/2 with output coupling κ and internal loss γ.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filter::FilterSpec;
use crate::models::{parametric_threshold, JpaModel};
use crate::quad;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DpaParams {
    pub delta: f64,
    pub lambda: Complex64,
    pub kappa: f64,
    pub gamma: f64,
}

impl DpaParams {
    pub fn new(delta: f64, lambda: Complex64, kappa: f64, gamma: f64) -> Result<Self> {
        if !(kappa > 0.0) || !(gamma >= 0.0) || !delta.is_finite() || !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(Error::InvalidParameter("kappa must be positive, gamma nonnegative, all finite".into()));
        }
        let p = Self { delta, lambda, kappa, gamma };
        if lambda.norm() >= p.threshold() {
            return Err(Error::AboveThreshold { pump: lambda.norm(), threshold: p.threshold() });
        }
        Ok(p)
    }

    /// The quadratic part of a model (Kerr and higher terms dropped).
    pub fn from_model(model: &JpaModel) -> Result<Self> {
        Self::new(model.detuning, model.pump, model.kappa, model.gamma)
    }

    pub fn kappa_tot(&self) -> f64 {
        self.kappa + self.gamma
    }

    pub fn threshold(&self) -> f64 {
        parametric_threshold(self.delta, self.kappa_tot())
    }

    /// D[ω] = Δ² + (κ_tot/2 − iω)² − |λ|².
    pub fn denominator(&self, omega: f64) -> Complex64 {
        let h = Complex64::new(0.5 * self.kappa_tot(), -omega);
        h * h + self.delta * self.delta - self.lambda.norm_sqr()
    }

    fn stationary_denominator(&self) -> f64 {
        let kt = self.kappa_tot();
        self.delta * self.delta + kt * kt / 4.0 - self.lambda.norm_sqr()
    }
}

/// Signal and idler amplitude gains at offset ω from the rotating frame.
pub fn signal_idler_gains(p: &DpaParams, omega: f64) -> (Complex64, Complex64) {
    let d = p.denominator(omega);
    let k = p.kappa;
    let gs = (Complex64::new(0.5 * k * p.kappa_tot(), 0.0) - I * k * (p.delta + omega)) / d - 1.0;
    let gi = -I * k * p.lambda / d;
    (gs, gi)
}

/// Phase-preserving photon-number gain |g_S|².
pub fn phase_preserving_gain(p: &DpaParams, omega: f64) -> f64 {
    signal_idler_gains(p, omega).0.norm_sqr()
}

/// Stationary centered moments N = ⟨a†a⟩, M = ⟨a²⟩ of the cavity field.
pub fn intracavity_moments(p: &DpaParams) -> (f64, Complex64) {
    let den = p.stationary_denominator();
    let n = p.lambda.norm_sqr() / (2.0 * den);
    let m = -p.lambda * Complex64::new(p.delta, 0.5 * p.kappa_tot()) / (2.0 * den);
    (n, m)
}

/// Output spectra N̄(ω) = ∫ds e^{−iωs}⟨a_out†(s)a_out(0)⟩ and the anomalous
/// counterpart M̄(ω) for vacuum inputs on both ports.
pub fn output_spectra(p: &DpaParams, omega: f64) -> (f64, Complex64) {
    let d2 = p.denominator(omega).norm_sqr();
    let l2 = p.lambda.norm_sqr();
    let n = p.kappa * p.kappa_tot() * l2 / d2;
    let h = Complex64::new(0.5 * p.kappa_tot(), -p.delta);
    let m = -I * p.kappa * p.lambda * (h * h + omega * omega + l2) / d2;
    (n, m)
}

/// M̄(ω) with the bracket (κ_tot − iΔ)² as it appears in some printed versions
/// of the result. Kept only to quantify the difference from [`output_spectra`].
pub fn output_m_printed(p: &DpaParams, omega: f64) -> Complex64 {
    let d2 = p.denominator(omega).norm_sqr();
    let h = Complex64::new(p.kappa_tot(), -p.delta);
    -I * p.kappa * p.lambda * (h * h + omega * omega + p.lambda.norm_sqr()) / d2
}

/// Result of a frequency-domain filter integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilteredMoments {
    pub n: f64,
    pub m: Complex64,
    /// Final half-width of the frequency window.
    pub cutoff: f64,
}

fn window_integral(p: &DpaParams, filter: &FilterSpec, cutoff: f64) -> Result<(f64, Complex64)> {
    let pieces = 64 + libm::ceil(cutoff * filter.support().1.max(-filter.support().0) / PI) as usize;
    let pieces = pieces.min(20_000);
    let tol = 1e-12;
    let n = quad::integrate(
        |w| Complex64::new(filter.power_response(w) * output_spectra(p, w).0, 0.0),
        -cutoff,
        cutoff,
        pieces,
        tol,
        1e-10,
    )?;
    let m = quad::integrate(|w| output_spectra(p, w).1 * filter.power_response(w), -cutoff, cutoff, pieces, tol, 1e-10)?;
    Ok((n.re / (2.0 * PI), m / (2.0 * PI)))
}

/// Centered moments of the filtered output mode, ∫ dω/2π |f̄(ω)|² N̄(ω) and
/// the same for M̄.
pub fn filtered_moments(p: &DpaParams, filter: &FilterSpec) -> Result<FilteredMoments> {
    let bw = 2.0 * PI * filter.bandwidth();
    let mut cutoff = 50.0 * p.kappa_tot().max(bw);
    let (mut n, mut m) = window_integral(p, filter, cutoff)?;
    for _ in 0..12 {
        cutoff *= 2.0;
        let (n2, m2) = window_integral(p, filter, cutoff)?;
        let change = (n2 - n).abs().max((m2 - m).norm());
        n = n2;
        m = m2;
        if change < 1e-9 * (1.0 + n.abs()) {
            return Ok(FilteredMoments { n, m, cutoff });
        }
    }
    Err(Error::QuadratureNonConvergence)
}

/// Squeezing level of an infinitely narrow filter centered at ω₀ on a
/// resonant, lossless DPA: 1 + 2κ|λ|/((κ/2 − |λ|)² + ω₀²).
pub fn narrowband_squeezing(omega0: f64, lambda_abs: f64, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) || lambda_abs < 0.0 || lambda_abs > 0.5 * kappa {
        return Err(Error::InvalidParameter("need kappa > 0 and 0 <= |lambda| <= kappa/2".into()));
    }
    let gap = 0.5 * kappa - lambda_abs;
    let den = gap * gap + omega0 * omega0;
    if den == 0.0 {
        return Err(Error::InvalidParameter("omega0 must be nonzero at threshold".into()));
    }
    Ok(1.0 + 2.0 * kappa * lambda_abs / den)
}

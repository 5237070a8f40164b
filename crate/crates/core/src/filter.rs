//! Temporal mode filters f(t) with ∫|f|² dt = 1.
//!
//! The filtered mode is D = ∫ dt f(−t) a_out(t). Bandwidths are noise-equivalent
//! widths in ordinary frequency, B = 1/|f̄(0)|² with f̄(ω) = ∫ dt e^{iωt} f(t),
//! so that ∫ |f̄|² dω/2π = 1 and a boxcar of length T has B = 1/T.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Gaussian kernels are cut at ±GAUSS_CUT·σ.
const GAUSS_CUT: f64 = 8.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FilterShape {
    /// f = 1/√T on [0, T].
    Boxcar { duration: f64 },
    /// f ∝ exp(−t²/4σ²) with σ set by the noise-equivalent bandwidth.
    Gaussian { bandwidth: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterSpec {
    pub shape: FilterShape,
    /// Sampling step of the discretized kernel; `None` picks support/256.
    pub dt: Option<f64>,
}

impl FilterSpec {
    pub fn boxcar(duration: f64) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParameter("boxcar duration must be positive".into()));
        }
        Ok(Self { shape: FilterShape::Boxcar { duration }, dt: None })
    }

    pub fn gaussian(bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::InvalidParameter("gaussian bandwidth must be positive".into()));
        }
        Ok(Self { shape: FilterShape::Gaussian { bandwidth }, dt: None })
    }

    pub fn with_dt(self, dt: f64) -> Self {
        Self { dt: Some(dt), ..self }
    }

    pub fn sigma(&self) -> Option<f64> {
        match self.shape {
            FilterShape::Gaussian { bandwidth } => Some(1.0 / (2.0 * libm::sqrt(2.0 * PI) * bandwidth)),
            FilterShape::Boxcar { .. } => None,
        }
    }

    /// Noise-equivalent bandwidth 1/(∫ f dt)².
    pub fn bandwidth(&self) -> f64 {
        match self.shape {
            FilterShape::Boxcar { duration } => 1.0 / duration,
            FilterShape::Gaussian { bandwidth } => bandwidth,
        }
    }

    /// Closed interval outside of which f vanishes (or is negligible).
    pub fn support(&self) -> (f64, f64) {
        match self.shape {
            FilterShape::Boxcar { duration } => (0.0, duration),
            FilterShape::Gaussian { .. } => {
                let s = self.sigma().unwrap_or(0.0);
                (-GAUSS_CUT * s, GAUSS_CUT * s)
            }
        }
    }

    /// Continuous kernel f(t), normalized on its (truncated) support.
    pub fn value(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t < lo || t > hi {
            return 0.0;
        }
        match self.shape {
            FilterShape::Boxcar { duration } => 1.0 / libm::sqrt(duration),
            FilterShape::Gaussian { .. } => {
                let s = self.sigma().unwrap_or(1.0);
                // renormalize for the mass lost beyond the cut
                let kept = libm::erf(GAUSS_CUT / libm::sqrt(2.0));
                libm::pow(2.0 * PI * s * s, -0.25) * libm::exp(-t * t / (4.0 * s * s)) / libm::sqrt(kept)
            }
        }
    }

    /// |f̄(ω)|² of the untruncated kernel.
    pub fn power_response(&self, omega: f64) -> f64 {
        match self.shape {
            FilterShape::Boxcar { duration } => {
                let x = 0.5 * omega * duration;
                if x.abs() < 1e-4 {
                    duration * (1.0 - x * x / 3.0)
                } else {
                    let s = libm::sin(x);
                    duration * s * s / (x * x)
                }
            }
            FilterShape::Gaussian { .. } => {
                let s = self.sigma().unwrap_or(1.0);
                2.0 * libm::sqrt(2.0 * PI) * s * libm::exp(-2.0 * s * s * omega * omega)
            }
        }
    }

    /// Full width at half maximum of |f̄(ω)|² in angular frequency.
    pub fn power_fwhm(&self) -> f64 {
        match self.shape {
            FilterShape::Gaussian { .. } => {
                let s = self.sigma().unwrap_or(1.0);
                2.0 * libm::sqrt(libm::log(2.0) / 2.0) / s
            }
            FilterShape::Boxcar { duration } => {
                // sin²x/x² = 1/2 at x ≈ 1.39156
                let mut x = 1.39;
                for _ in 0..50 {
                    let g = libm::sin(x) / x - core::f64::consts::FRAC_1_SQRT_2;
                    let dg = libm::cos(x) / x - libm::sin(x) / (x * x);
                    x -= g / dg;
                }
                4.0 * x / duration
            }
        }
    }

    /// Sampled kernel on a uniform grid over the support.
    pub fn kernel(&self) -> Result<FilterKernel> {
        let (lo, hi) = self.support();
        let span = hi - lo;
        let dt = self.dt.unwrap_or(span / 256.0);
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter("filter step must be positive".into()));
        }
        let points = libm::floor(span / dt + 1e-9) as usize;
        let resolved = match self.shape {
            FilterShape::Boxcar { .. } => points,
            // a Gaussian is resolved on the scale of its σ, count points per 4σ
            FilterShape::Gaussian { .. } => libm::floor(4.0 * self.sigma().unwrap_or(0.0) / dt) as usize,
        };
        if resolved < 32 {
            return Err(Error::UnderResolvedGrid { points: resolved });
        }
        let n = points + 1;
        let step = span / points as f64;
        let mut times = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            let t = lo + i as f64 * step;
            times.push(t);
            values.push(self.value(t));
        }
        let norm: f64 = trapezoid(&values.iter().map(|v| v * v).collect::<Vec<_>>(), step);
        let scale = 1.0 / libm::sqrt(norm);
        for v in &mut values {
            *v *= scale;
        }
        Ok(FilterKernel { times, values, dt: step })
    }
}

fn trapezoid(y: &[f64], h: f64) -> f64 {
    let n = y.len();
    if n < 2 {
        return 0.0;
    }
    h * (y.iter().sum::<f64>() - 0.5 * (y[0] + y[n - 1]))
}

/// Discretized kernel, normalized so that the trapezoid rule gives ∫|f|² = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterKernel {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub dt: f64,
}

impl FilterKernel {
    pub fn norm_sq(&self) -> f64 {
        trapezoid(&self.values.iter().map(|v| v * v).collect::<Vec<_>>(), self.dt)
    }

    /// |f̄(ω)|² of the sampled kernel by trapezoid quadrature.
    pub fn power_response(&self, omega: f64) -> f64 {
        let n = self.values.len();
        let (mut re, mut im) = (0.0, 0.0);
        for i in 0..n {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            let ph = omega * self.times[i];
            re += w * self.values[i] * libm::cos(ph);
            im += w * self.values[i] * libm::sin(ph);
        }
        (re * re + im * im) * self.dt * self.dt
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boxcar_bandwidth() {
        let f = FilterSpec::boxcar(0.256).unwrap();
        assert!((f.bandwidth() - 3.90625).abs() < 1e-12);
        let k = f.kernel().unwrap();
        assert!((k.norm_sq() - 1.0).abs() < 1e-10);
        assert!((f.power_response(0.0) - 0.256).abs() < 1e-15);
    }

    #[test]
    fn gaussian_normalization_and_width() {
        let f = FilterSpec::gaussian(4.0).unwrap();
        let k = f.kernel().unwrap();
        assert!((k.norm_sq() - 1.0).abs() < 1e-10);
        assert!((f.power_response(0.0) - 0.25).abs() < 1e-12);
        let half = f.power_fwhm() / 2.0;
        assert!((f.power_response(half) / f.power_response(0.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn under_resolved_rejected() {
        let f = FilterSpec::boxcar(1.0).unwrap().with_dt(0.05);
        assert!(matches!(f.kernel(), Err(Error::UnderResolvedGrid { points: 20 })));
    }
}

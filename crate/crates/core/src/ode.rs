//! Dormand–Prince 5(4) integrator for complex linear systems.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { abs: 1e-10, rel: 1e-8 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integration statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Adaptive integrator state, reusable across calls to keep the step size.
pub struct DormandPrince {
    tol: Tolerances,
    h: f64,
    k: [Vec<Complex64>; 7],
    tmp: Vec<Complex64>,
    ynew: Vec<Complex64>,
    pub stats: OdeStats,
}

fn axpy_into(out: &mut [Complex64], y: &[Complex64], h: f64, terms: &[(f64, &[Complex64])]) {
    for i in 0..out.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        out[i] = y[i] + acc * h;
    }
}

impl DormandPrince {
    pub fn new(len: usize, tol: Tolerances) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); len];
        Self {
            tol,
            h: 0.0,
            k: [z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z.clone(),
            ynew: z,
            stats: OdeStats::default(),
        }
    }

    /// Advances y from t0 to t1 under dy/dt = f(t, y).
    pub fn integrate<F>(&mut self, f: &mut F, t0: f64, t1: f64, y: &mut [Complex64]) -> Result<()>
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
    {
        let span = t1 - t0;
        if span == 0.0 {
            return Ok(());
        }
        if span < 0.0 {
            return Err(Error::InvalidParameter("integration must run forward in time".into()));
        }
        let mut t = t0;
        if self.h <= 0.0 {
            self.h = self.initial_step(f, t0, y, span);
        }
        f(t, y, &mut self.k[0]);
        loop {
            let remaining = t1 - t;
            if remaining <= 1e-14 * t1.abs().max(span) {
                return Ok(());
            }
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            if h < 1e-14 * t.abs().max(span) {
                return Err(Error::StepSizeUnderflow(t));
            }
            let err = self.step(f, t, h, y);
            if err <= 1.0 {
                t = if last { t1 } else { t + h };
                y.copy_from_slice(&self.ynew);
                // first-same-as-last
                self.k.swap(0, 6);
                self.stats.accepted += 1;
                let factor = if err == 0.0 { 5.0 } else { (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0) };
                if !last || factor < 1.0 {
                    self.h = h * factor;
                }
            } else {
                self.stats.rejected += 1;
                self.h = h * (0.9 * libm::pow(err, -0.2)).clamp(0.1, 1.0);
            }
        }
    }

    fn initial_step<F>(&mut self, f: &mut F, t0: f64, y: &[Complex64], span: f64) -> f64
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
    {
        f(t0, y, &mut self.tmp);
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..y.len() {
            let sc = self.tol.abs + self.tol.rel * y[i].norm();
            d0 += libm::pow(y[i].norm() / sc, 2.0);
            d1 += libm::pow(self.tmp[i].norm() / sc, 2.0);
        }
        let n = y.len().max(1) as f64;
        let (d0, d1) = (libm::sqrt(d0 / n), libm::sqrt(d1 / n));
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0.min(span)
    }

    fn step<F>(&mut self, f: &mut F, t: f64, h: f64, y: &[Complex64]) -> f64
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
    {
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        axpy_into(&mut self.tmp, y, h, &[(A21, k1)]);
        f(t + C2 * h, &self.tmp, k2);
        axpy_into(&mut self.tmp, y, h, &[(A31, k1), (A32, k2)]);
        f(t + C3 * h, &self.tmp, k3);
        axpy_into(&mut self.tmp, y, h, &[(A41, k1), (A42, k2), (A43, k3)]);
        f(t + C4 * h, &self.tmp, k4);
        axpy_into(&mut self.tmp, y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
        f(t + C5 * h, &self.tmp, k5);
        axpy_into(&mut self.tmp, y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]);
        f(t + h, &self.tmp, k6);
        axpy_into(&mut self.ynew, y, h, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
        f(t + h, &self.ynew, k7);
        let mut acc = 0.0;
        for i in 0..y.len() {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let sc = self.tol.abs + self.tol.rel * y[i].norm().max(self.ynew[i].norm());
            acc += e.norm_sqr() / (sc * sc);
        }
        libm::sqrt(acc / y.len().max(1) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillating_decay() {
        let lam = Complex64::new(-0.5, 3.0);
        let mut ode = DormandPrince::new(1, Tolerances::default());
        let mut y = [Complex64::new(1.0, 0.0)];
        ode.integrate(&mut |_, y: &[Complex64], dy: &mut [Complex64]| dy[0] = lam * y[0], 0.0, 4.0, &mut y)
            .unwrap();
        let want = (lam * 4.0).exp();
        assert!((y[0] - want).norm() < 1e-8);
    }

    #[test]
    fn time_dependent_source() {
        // y' = cos t, y(0) = 0
        let mut ode = DormandPrince::new(1, Tolerances::default());
        let mut y = [Complex64::new(0.0, 0.0)];
        ode.integrate(&mut |t, _: &[Complex64], dy: &mut [Complex64]| dy[0] = Complex64::new(libm::cos(t), 0.0), 0.0, 2.0, &mut y)
            .unwrap();
        let e = (y[0].re - libm::sin(2.0)).abs();
        assert!(e < 1e-7, "{e} {:?}", ode.stats);
    }
}

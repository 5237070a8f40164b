//! Output-field statistics of a stationary cavity with vacuum inputs.
//!
//! Normally ordered output correlators equal κ^{k/2} times the cavity
//! correlators with the a† anti-time-ordered and the a time-ordered. In the
//! Schrödinger picture an a at time t multiplies the propagated operator from
//! the left and an a† from the right.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filter::FilterSpec;
use crate::fock::{annihilation, trace_product, CMatrix, DensityMatrix};
use crate::lindblad::{model_liouvillian, propagate_operator_kernel, steady_state_full, Liouvillian, ShiftedResolvent, SteadyState};
use crate::models::JpaModel;
use crate::ode::{DormandPrince, Tolerances};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Highest total order of filtered moments.
pub const MAX_ORDER: usize = 4;

/// Liouvillian and steady state of a model, shared by all output-field queries.
pub struct StationaryCavity {
    pub liouvillian: Liouvillian,
    pub steady: SteadyState,
    /// Output coupling κ.
    pub kappa: f64,
    /// κ + γ.
    pub kappa_tot: f64,
    a: CMatrix,
}

impl StationaryCavity {
    pub fn new(model: &JpaModel, dim: usize) -> Result<Self> {
        let liouvillian = model_liouvillian(model, dim)?;
        let steady = steady_state_full(&liouvillian)?;
        Ok(Self { a: annihilation(dim)?.into_matrix(), liouvillian, steady, kappa: model.kappa, kappa_tot: model.kappa_tot() })
    }

    /// From an explicit Liouvillian whose output port has coupling `kappa`.
    pub fn from_liouvillian(liouvillian: Liouvillian, kappa: f64, kappa_tot: f64) -> Result<Self> {
        let steady = steady_state_full(&liouvillian)?;
        let a = annihilation(liouvillian.dim())?.into_matrix();
        Ok(Self { liouvillian, steady, kappa, kappa_tot, a })
    }

    pub fn dim(&self) -> usize {
        self.liouvillian.dim()
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.steady.rho
    }

    pub fn mean_field(&self) -> Complex64 {
        trace_product(&self.a, self.rho().matrix())
    }

    /// Output spectra N̄(ω), M̄(ω) of the fluctuations (mean removed), from
    /// resolvents of the Liouvillian. Output fields at different times commute,
    /// so both delays of ⟨a_out(s)a_out(0)⟩ use the time-ordered cavity correlator.
    pub fn output_spectra(&self, omega: f64) -> Result<(f64, Complex64)> {
        let rho = self.rho().matrix();
        let mean = self.mean_field();
        let x = &self.a * rho - rho * mean;
        let ad = self.a.adjoint();
        let (n, m) = if omega == 0.0 {
            let y = self.steady.integrate_decay(&x)?;
            (2.0 * trace_product(&ad, &y).re, trace_product(&self.a, &y) * 2.0)
        } else {
            let minus = ShiftedResolvent::new(&self.liouvillian, Complex64::new(0.0, -omega))?.apply(&x);
            let plus = ShiftedResolvent::new(&self.liouvillian, Complex64::new(0.0, omega))?.apply(&x);
            (2.0 * trace_product(&ad, &minus).re, trace_product(&self.a, &minus) + trace_product(&self.a, &plus))
        };
        Ok((self.kappa * n, m * self.kappa))
    }

    /// Stationary two-time correlator ⟨A(τ) B(0)⟩ = Tr[A e^{Lτ}(Bρ)] on a τ grid.
    /// The grid must extend over at least 10/κ_tot.
    pub fn two_time_correlator(&self, a_op: &CMatrix, b_op: &CMatrix, taus: &[f64]) -> Result<Vec<Complex64>> {
        let span = taus.iter().copied().fold(0.0, f64::max);
        let needed = 10.0 / self.kappa_tot;
        if span < needed {
            return Err(Error::InsufficientDecay { span, needed });
        }
        let mut order: Vec<usize> = (0..taus.len()).collect();
        order.sort_by(|&i, &j| taus[i].total_cmp(&taus[j]));
        let mut x = b_op * self.rho().matrix();
        let mut t = 0.0;
        let mut out = vec![ZERO; taus.len()];
        for i in order {
            if taus[i] < 0.0 {
                return Err(Error::InvalidParameter("correlator delays must be nonnegative".into()));
            }
            x = propagate_operator_kernel(&self.liouvillian, &x, taus[i] - t)?;
            t = taus[i];
            out[i] = trace_product(a_op, &x);
        }
        Ok(out)
    }

    /// Normally ordered output correlator ⟨a_out†(s₁)…a_out†(s_p) a_out(t₁)…a_out(t_q)⟩
    /// with the steady state prepared at the earliest time.
    pub fn output_correlator(&self, dagger_times: &[f64], times: &[f64]) -> Result<Complex64> {
        let mut events: Vec<(f64, bool)> = dagger_times.iter().map(|&t| (t, true)).chain(times.iter().map(|&t| (t, false))).collect();
        events.sort_by(|x, y| x.0.total_cmp(&y.0));
        let ad = self.a.adjoint();
        let mut x = self.rho().matrix().clone();
        let mut t = events.first().map_or(0.0, |e| e.0);
        for (te, dagger) in events {
            x = propagate_operator_kernel(&self.liouvillian, &x, te - t)?;
            t = te;
            x = if dagger { &x * &ad } else { &self.a * &x };
        }
        let k = (dagger_times.len() + times.len()) as i32;
        Ok(x.trace() * libm::pow(self.kappa, 0.5 * k as f64))
    }

    /// Normally ordered moments ⟨D†ᵖ D^q⟩, p + q ≤ `order`, of the filtered
    /// output mode D = ∫ dt f(−t) a_out(t).
    pub fn filtered_moments(&self, filter: &FilterSpec, order: usize, tol: Tolerances) -> Result<MomentSet> {
        if order > MAX_ORDER {
            return Err(Error::OrderTooHigh(order));
        }
        filter.kernel()?;
        let n = self.dim();
        let nn = n * n;
        // lower-triangle index pairs (p ≤ q), each depending on (p, q−1) and (p−1, q)
        let pairs: Vec<(usize, usize)> = (1..=order)
            .flat_map(|k| (0..=k / 2).map(move |p| (p, k - p)))
            .collect();
        let slot = |p: usize, q: usize| -> Source {
            if p == 0 && q == 0 {
                Source::Rho
            } else if p <= q {
                Source::Slot(pairs.iter().position(|&x| x == (p, q)).unwrap_or(0))
            } else {
                Source::Adjoint(pairs.iter().position(|&x| x == (q, p)).unwrap_or(0))
            }
        };
        let sources: Vec<(Option<Source>, Option<Source>)> = pairs
            .iter()
            .map(|&(p, q)| ((q >= 1).then(|| slot(p, q - 1)), (p >= 1).then(|| slot(p - 1, q))))
            .collect();
        let (lo, hi) = filter.support();
        // g(t) = f(−t) lives on [−hi, −lo]
        let (t0, t1) = (-hi, -lo);
        let sk = libm::sqrt(self.kappa);
        let rho = self.rho().matrix().clone();
        let len = pairs.len() * nn + 1;
        let mut y = vec![ZERO; len];
        let mut ode = DormandPrince::new(len, tol);
        let l = &self.liouvillian;
        let mut rhs = |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
            let g = filter.value(-t);
            for k in 0..pairs.len() {
                let (xs, dx) = (&y[k * nn..(k + 1) * nn], &mut dy[k * nn..(k + 1) * nn]);
                l.apply(xs, dx);
                let gs = g * sk;
                if gs == 0.0 {
                    continue;
                }
                // a X_{p,q−1}
                if let Some(src) = sources[k].0 {
                    for c in 0..n {
                        for m in 0..n - 1 {
                            dx[m + c * n] += src.fetch(y, &rho, n, m + 1, c) * (gs * libm::sqrt((m + 1) as f64));
                        }
                    }
                }
                // X_{p−1,q} a†
                if let Some(src) = sources[k].1 {
                    for c in 0..n - 1 {
                        for m in 0..n {
                            dx[m + c * n] += src.fetch(y, &rho, n, m, c + 1) * (gs * libm::sqrt((c + 1) as f64));
                        }
                    }
                }
            }
            dy[len - 1] = Complex64::new(g * g, 0.0);
        };
        ode.integrate(&mut rhs, t0, t1, &mut y)?;
        let mut moments = BTreeMap::new();
        moments.insert((0, 0), Complex64::new(1.0, 0.0));
        for (k, &(p, q)) in pairs.iter().enumerate() {
            let x = &y[k * nn..(k + 1) * nn];
            let tr: Complex64 = (0..n).map(|m| x[m + m * n]).sum();
            let v = tr * (factorial(p) * factorial(q));
            moments.insert((p, q), v);
            if p != q {
                moments.insert((q, p), v.conj());
            }
        }
        let norm = y[len - 1].re;
        Ok(MomentSet { moments, commutator: norm, order, steps: ode.stats.accepted })
    }
}

/// Where the source term of a moment equation reads from: ρ, a stored
/// X_{p,q} (p ≤ q), or the adjoint of a stored one.
#[derive(Clone, Copy, Debug)]
enum Source {
    Rho,
    Slot(usize),
    Adjoint(usize),
}

impl Source {
    #[inline]
    fn fetch(self, y: &[Complex64], rho: &CMatrix, n: usize, m: usize, c: usize) -> Complex64 {
        let nn = n * n;
        match self {
            Source::Rho => rho[(m, c)],
            Source::Slot(k) => y[k * nn + m + c * n],
            Source::Adjoint(k) => y[k * nn + c + m * n].conj(),
        }
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Normally ordered moments ⟨D†ᵖD^q⟩ of a single mode.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSet {
    pub moments: BTreeMap<(usize, usize), Complex64>,
    /// [D, D†] of the filtered mode, 1 for a normalized filter.
    pub commutator: f64,
    pub order: usize,
    /// Accepted integrator steps, zero when not produced by integration.
    pub steps: usize,
}

impl MomentSet {
    /// Builds a set from the lower-triangle moments (p ≤ q) and fills in conjugates.
    pub fn from_normal_ordered(order: usize, entries: &[((usize, usize), Complex64)]) -> Self {
        let mut moments = BTreeMap::new();
        moments.insert((0, 0), Complex64::new(1.0, 0.0));
        for &((p, q), v) in entries {
            moments.insert((p, q), v);
            moments.insert((q, p), v.conj());
        }
        Self { moments, commutator: 1.0, order, steps: 0 }
    }

    pub fn get(&self, p: usize, q: usize) -> Result<Complex64> {
        self.moments.get(&(p, q)).copied().ok_or(Error::MissingMoment(p, q))
    }

    pub fn mean(&self) -> Result<Complex64> {
        self.get(0, 1)
    }

    /// ⟨D†D⟩ − |⟨D⟩|².
    pub fn centered_n(&self) -> Result<f64> {
        Ok(self.get(1, 1)?.re - self.mean()?.norm_sqr())
    }

    /// ⟨D²⟩ − ⟨D⟩².
    pub fn centered_m(&self) -> Result<Complex64> {
        let d = self.mean()?;
        Ok(self.get(0, 2)? - d * d)
    }

    pub fn squeezing_level(&self) -> Result<f64> {
        squeezing_level(self.centered_n()?, self.centered_m()?)
    }
}

/// S = (1/2)/(N + 1/2 − |M|), the ratio of vacuum to minimal quadrature variance.
pub fn squeezing_level(n: f64, m: Complex64) -> Result<f64> {
    let var = n + 0.5 - m.norm();
    if !(var > 0.0) {
        return Err(Error::UnphysicalMoments(var));
    }
    Ok(0.5 / var)
}

pub fn to_db(x: f64) -> f64 {
    10.0 * libm::log10(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::JpaModel;

    #[test]
    fn squeezing_of_vacuum_is_unity() {
        assert_eq!(squeezing_level(0.0, ZERO).unwrap(), 1.0);
        assert!(matches!(squeezing_level(0.1, Complex64::new(0.7, 0.0)), Err(Error::UnphysicalMoments(_))));
    }

    #[test]
    fn unpumped_cavity_is_silent() {
        let m = JpaModel::dpa(0.2, ZERO, 1.0, 0.1).unwrap();
        let cav = StationaryCavity::new(&m, 6).unwrap();
        let (n, mm) = cav.output_spectra(0.3).unwrap();
        assert!(n.abs() < 1e-14 && mm.norm() < 1e-14);
        let ms = cav.filtered_moments(&FilterSpec::boxcar(4.0).unwrap(), 4, Tolerances::default()).unwrap();
        for (&(p, q), v) in &ms.moments {
            if p + q > 0 {
                assert!(v.norm() < 1e-12, "{p},{q}: {v}");
            }
        }
        assert!((ms.commutator - 1.0).abs() < 1e-8);
    }

    #[test]
    fn order_guard() {
        let m = JpaModel::dpa(0.0, ZERO, 1.0, 0.0).unwrap();
        let cav = StationaryCavity::new(&m, 4).unwrap();
        assert!(matches!(
            cav.filtered_moments(&FilterSpec::boxcar(1.0).unwrap(), 5, Tolerances::default()),
            Err(Error::OrderTooHigh(5))
        ));
    }
}

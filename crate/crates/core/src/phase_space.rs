//! Wigner and Husimi Q functions on a rectangular quadrature grid.
//!
//! Grid coordinates are the quadratures (x, p) with β = (x + ip)/√2. The Wigner
//! function is a density per dx dp; the Q function is a density per d²β = dx dp/2,
//! so both give 1/π at the origin for vacuum.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::DensityMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSpaceGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_x: usize,
    pub n_p: usize,
}

impl PhaseSpaceGrid {
    pub fn new(x_min: f64, x_max: f64, p_min: f64, p_max: f64, n_x: usize, n_p: usize) -> Result<Self> {
        let finite = [x_min, x_max, p_min, p_max].iter().all(|v| v.is_finite());
        if !finite || x_max <= x_min || p_max <= p_min {
            return Err(Error::InvalidParameter("phase-space bounds must be finite and ordered".into()));
        }
        if n_x < 2 || n_p < 2 {
            return Err(Error::InvalidParameter("phase-space grid needs at least 2 points per axis".into()));
        }
        Ok(Self { x_min, x_max, p_min, p_max, n_x, n_p })
    }

    pub fn square(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, -half_width, half_width, n, n)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_x - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.n_p - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp()
    }

    /// Trapezoid weight of node (i, j) in dx dp units.
    fn weight(&self, i: usize, j: usize) -> f64 {
        let wx = if i == 0 || i == self.n_x - 1 { 0.5 } else { 1.0 };
        let wp = if j == 0 || j == self.n_p - 1 { 0.5 } else { 1.0 };
        wx * wp * self.dx() * self.dp()
    }
}

/// Real field sampled on a grid, stored row-major with p as the slow index.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceField {
    pub grid: PhaseSpaceGrid,
    pub values: Vec<f64>,
    /// Factor converting dx dp into the field's own area element (1 for W, 1/2 for Q).
    pub measure: f64,
    /// Set when the grid is too coarse or too narrow for the state.
    pub coarse: bool,
}

impl PhaseSpaceField {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.n_x + i]
    }

    pub fn integral(&self) -> f64 {
        self.weighted_sum(|_, _| 1.0)
    }

    fn weighted_sum(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let g = &self.grid;
        let mut acc = 0.0;
        for j in 0..g.n_p {
            for i in 0..g.n_x {
                acc += g.weight(i, j) * self.at(i, j) * f(g.x(i), g.p(j));
            }
        }
        acc * self.measure
    }

    /// Mean (x, p) and covariance [[xx, xp], [xp, pp]] of the field treated as a distribution.
    pub fn quadrature_moments(&self) -> ([f64; 2], [[f64; 2]; 2]) {
        let norm = self.integral();
        let mx = self.weighted_sum(|x, _| x) / norm;
        let mp = self.weighted_sum(|_, p| p) / norm;
        let xx = self.weighted_sum(|x, _| (x - mx) * (x - mx)) / norm;
        let pp = self.weighted_sum(|_, p| (p - mp) * (p - mp)) / norm;
        let xp = self.weighted_sum(|x, p| (x - mx) * (p - mp)) / norm;
        ([mx, mp], [[xx, xp], [xp, pp]])
    }

    /// (x, p, value) triples in storage order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let g = self.grid;
        (0..g.n_p).flat_map(move |j| (0..g.n_x).map(move |i| (g.x(i), g.p(j), self.at(i, j))))
    }
}

/// Smallest quadrature standard deviation of ρ (symmetric ordering).
fn min_quadrature_std(rho: &DensityMatrix) -> f64 {
    let (n, m, _) = rho.centered_moments();
    libm::sqrt((n + 0.5 - m.norm()).max(1e-300))
}

fn flag_coarse(field: &mut PhaseSpaceField, state_std: f64) {
    let g = field.grid;
    let spacing = g.dx().max(g.dp());
    let peak = field.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let mut edge = 0.0_f64;
    for j in 0..g.n_p {
        edge = edge.max(field.at(0, j).abs()).max(field.at(g.n_x - 1, j).abs());
    }
    for i in 0..g.n_x {
        edge = edge.max(field.at(i, 0).abs()).max(field.at(i, g.n_p - 1).abs());
    }
    let integral = field.integral();
    field.coarse = spacing > 0.5 * state_std || edge > 1e-3 * peak || (integral - 1.0).abs() > 1e-3;
}

/// Wigner function by the Laguerre-series terms of |m⟩⟨n|, generated with their
/// three-term recurrence in the Fock indices.
pub fn wigner(rho: &DensityMatrix) -> impl Fn(f64, f64) -> f64 + '_ {
    let dim = rho.dim();
    let sqrt_n: Vec<f64> = (0..dim).map(|k| libm::sqrt(k as f64)).collect();
    move |x: f64, p: f64| {
        let r = rho.matrix();
        let a = Complex64::new(x, p) * core::f64::consts::FRAC_1_SQRT_2;
        let a2 = a * 2.0;
        let a2c = a2.conj();
        let mut w = vec![Complex64::new(0.0, 0.0); dim];
        w[0] = Complex64::new(libm::exp(-2.0 * a.norm_sqr()) / core::f64::consts::PI, 0.0);
        let mut acc = r[(0, 0)].re * w[0].re;
        for n in 1..dim {
            w[n] = a2 * w[n - 1] / sqrt_n[n];
            acc += 2.0 * (r[(0, n)] * w[n]).re;
        }
        for m in 1..dim {
            let mut temp = w[m];
            w[m] = (a2c * temp - w[m - 1] * sqrt_n[m]) / sqrt_n[m];
            acc += (r[(m, m)] * w[m]).re;
            for n in (m + 1)..dim {
                let next = (a2 * w[n - 1] - temp * sqrt_n[m]) / sqrt_n[n];
                temp = w[n];
                w[n] = next;
                acc += 2.0 * (r[(m, n)] * w[n]).re;
            }
        }
        acc
    }
}

/// ⟨β|ρ|β⟩/π with β = (x + ip)/√2.
pub fn husimi_q(rho: &DensityMatrix) -> impl Fn(f64, f64) -> f64 + '_ {
    let dim = rho.dim();
    move |x: f64, p: f64| {
        let beta = Complex64::new(x, p) * core::f64::consts::FRAC_1_SQRT_2;
        let mut c = vec![Complex64::new(0.0, 0.0); dim];
        c[0] = Complex64::new(libm::exp(-0.5 * beta.norm_sqr()), 0.0);
        for n in 1..dim {
            c[n] = c[n - 1] * beta / libm::sqrt(n as f64);
        }
        let r = rho.matrix();
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..dim {
            let mut row = Complex64::new(0.0, 0.0);
            for m in 0..dim {
                row += c[m].conj() * r[(m, n)];
            }
            acc += row * c[n];
        }
        acc.re / core::f64::consts::PI
    }
}

fn sample(grid: &PhaseSpaceGrid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut values = Vec::with_capacity(grid.n_x * grid.n_p);
    for j in 0..grid.n_p {
        for i in 0..grid.n_x {
            values.push(f(grid.x(i), grid.p(j)));
        }
    }
    values
}

pub fn wigner_on_grid(rho: &DensityMatrix, grid: &PhaseSpaceGrid) -> PhaseSpaceField {
    let values = sample(grid, wigner(rho));
    let mut field = PhaseSpaceField { grid: *grid, values, measure: 1.0, coarse: false };
    flag_coarse(&mut field, min_quadrature_std(rho));
    field
}

pub fn husimi_q_on_grid(rho: &DensityMatrix, grid: &PhaseSpaceGrid) -> PhaseSpaceField {
    let values = sample(grid, husimi_q(rho));
    let mut field = PhaseSpaceField { grid: *grid, values, measure: 0.5, coarse: false };
    let std = libm::sqrt(libm::pow(min_quadrature_std(rho), 2.0) + 0.5);
    flag_coarse(&mut field, std);
    field
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{annihilation, displacement_operator};
    use nalgebra::DMatrix;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    fn gen_laguerre(n: usize, alpha: f64, x: f64) -> f64 {
        // explicit sum, fine for the small orders used here
        let mut s = 0.0;
        for i in 0..=n {
            let binom = libm::tgamma(n as f64 + alpha + 1.0)
                / (libm::tgamma(n as f64 - i as f64 + 1.0) * libm::tgamma(alpha + i as f64 + 1.0));
            s += binom * (-x).powi(i as i32) / factorial(i);
        }
        s
    }

    fn wigner_direct(rho: &DensityMatrix, x: f64, p: f64) -> f64 {
        let a = Complex64::new(x, p) * core::f64::consts::FRAC_1_SQRT_2;
        let r = rho.matrix();
        let mut acc = 0.0;
        for m in 0..rho.dim() {
            for n in m..rho.dim() {
                let k = n - m;
                let pref = if m % 2 == 0 { 1.0 } else { -1.0 } * libm::sqrt(factorial(m) / factorial(n));
                let term = (a * 2.0).powu(k as u32)
                    * pref
                    * gen_laguerre(m, k as f64, 4.0 * a.norm_sqr())
                    * libm::exp(-2.0 * a.norm_sqr())
                    / core::f64::consts::PI;
                let c = r[(m, n)] * term;
                acc += if n == m { c.re } else { 2.0 * c.re };
            }
        }
        acc
    }

    fn squeezed(dim: usize, r: f64) -> DensityMatrix {
        let a = annihilation(dim).unwrap();
        let a2 = a.matrix() * a.matrix();
        let gen = (&a2 - a2.adjoint()) * Complex64::new(0.5 * r, 0.0);
        let s = crate::expm::expm(&gen);
        let d = displacement_operator(dim, Complex64::new(0.3, 0.2)).unwrap();
        let psi = (d.matrix() * s).column(0).into_owned();
        DensityMatrix::pure(&psi).unwrap()
    }

    #[test]
    fn vacuum_values() {
        let vac = DensityMatrix::vacuum(6).unwrap();
        let pi = core::f64::consts::PI;
        assert!((wigner(&vac)(0.0, 0.0) - 1.0 / pi).abs() < 1e-15);
        assert!((husimi_q(&vac)(0.0, 0.0) - 1.0 / pi).abs() < 1e-15);
    }

    #[test]
    fn recurrence_matches_laguerre_series() {
        let mut m = DMatrix::from_fn(6, 6, |i, j| Complex64::new(1.0 / (1.0 + (i + j) as f64), 0.1 * (i as f64 - j as f64)));
        m = &m * m.adjoint();
        let rho = DensityMatrix::from_matrix_normalized(m).unwrap();
        let w = wigner(&rho);
        for &(x, p) in &[(0.0, 0.0), (0.7, -0.4), (-1.3, 2.1), (2.5, 0.5)] {
            assert!((w(x, p) - wigner_direct(&rho, x, p)).abs() < 1e-12);
        }
    }

    #[test]
    fn normalization_and_positivity() {
        let rho = squeezed(40, 0.5);
        let grid = PhaseSpaceGrid::square(7.0, 81).unwrap();
        let w = wigner_on_grid(&rho, &grid);
        let q = husimi_q_on_grid(&rho, &grid);
        assert!((w.integral() - 1.0).abs() < 1e-3);
        assert!((q.integral() - 1.0).abs() < 1e-3);
        assert!(q.values.iter().all(|&v| v >= 0.0));
        assert!(!w.coarse);
    }

    #[test]
    fn coarse_grid_is_flagged() {
        let rho = squeezed(40, 1.0);
        let grid = PhaseSpaceGrid::square(7.0, 9).unwrap();
        assert!(wigner_on_grid(&rho, &grid).coarse);
        let narrow = PhaseSpaceGrid::square(0.5, 40).unwrap();
        assert!(wigner_on_grid(&rho, &narrow).coarse);
    }

    #[test]
    fn wigner_second_moments_are_symmetric_moments() {
        let rho = squeezed(40, 0.4);
        let grid = PhaseSpaceGrid::square(7.0, 121).unwrap();
        let (_, cov) = wigner_on_grid(&rho, &grid).quadrature_moments();
        let (n, m, _) = rho.centered_moments();
        let xx = n + 0.5 + m.re;
        let pp = n + 0.5 - m.re;
        assert!((cov[0][0] - xx).abs() < 1e-6);
        assert!((cov[1][1] - pp).abs() < 1e-6);
        assert!((cov[0][1] - m.im).abs() < 1e-6);
    }
}

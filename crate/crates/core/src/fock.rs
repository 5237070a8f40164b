//! Operators and states on a truncated Fock space.

use alloc::format;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expm::expm;

pub type CMatrix = DMatrix<Complex64>;

const HERMITIAN_TOL: f64 = 1e-12;

/// Square complex matrix on a Fock space of dimension `dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    mat: CMatrix,
    hermitian: bool,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension { got: dim, min: 2 });
    }
    Ok(())
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

impl FockOperator {
    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(mat.nrows(), mat.ncols()));
        }
        check_dim(mat.nrows())?;
        Ok(Self { mat, hermitian: false })
    }

    /// Wraps a matrix that must be Hermitian within 1e-12 (scaled by its largest entry).
    pub fn hermitian(mat: CMatrix) -> Result<Self> {
        let mut op = Self::from_matrix(mat)?;
        let scale = max_abs(&op.mat).max(1.0);
        let defect = hermiticity_defect(&op.mat);
        if defect > HERMITIAN_TOL * scale {
            return Err(Error::InvalidParameter(format!(
                "operator not Hermitian (defect {defect:e})"
            )));
        }
        op.hermitian = true;
        Ok(op)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { mat: CMatrix::identity(dim, dim), hermitian: true })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { mat: CMatrix::zeros(dim, dim), hermitian: true })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint(), hermitian: self.hermitian }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { mat: &self.mat * c, hermitian: self.hermitian && c.im == 0.0 }
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, k: u32) -> Self {
        let mut out = CMatrix::identity(self.dim(), self.dim());
        for _ in 0..k {
            out = &out * &self.mat;
        }
        Self { mat: out, hermitian: self.hermitian }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self { mat: &self.mat * &other.mat - &other.mat * &self.mat, hermitian: false }
    }

    /// Nonzero entries as (row, col, value), column-major order.
    pub fn nonzeros(&self) -> Vec<(usize, usize, Complex64)> {
        let n = self.dim();
        let mut out = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let z = self.mat[(i, j)];
                if z != Complex64::new(0.0, 0.0) {
                    out.push((i, j, z));
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a FockOperator> for &'a FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: &FockOperator) -> FockOperator {
        FockOperator { mat: &self.mat + &rhs.mat, hermitian: self.hermitian && rhs.hermitian }
    }
}

impl<'a> Sub<&'a FockOperator> for &'a FockOperator {
    type Output = FockOperator;
    fn sub(self, rhs: &FockOperator) -> FockOperator {
        FockOperator { mat: &self.mat - &rhs.mat, hermitian: self.hermitian && rhs.hermitian }
    }
}

impl<'a> Mul<&'a FockOperator> for &'a FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: &FockOperator) -> FockOperator {
        FockOperator { mat: &self.mat * &rhs.mat, hermitian: false }
    }
}

/// Annihilation operator with ⟨n−1|a|n⟩ = √n.
pub fn annihilation(dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    let mut m = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = Complex64::new(libm::sqrt(n as f64), 0.0);
    }
    Ok(FockOperator { mat: m, hermitian: false })
}

pub fn creation(dim: usize) -> Result<FockOperator> {
    Ok(annihilation(dim)?.adjoint())
}

pub fn number(dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    let mut m = CMatrix::zeros(dim, dim);
    for n in 0..dim {
        m[(n, n)] = Complex64::new(n as f64, 0.0);
    }
    Ok(FockOperator { mat: m, hermitian: true })
}

/// Quadrature X = (a + a†)/√2.
pub fn quadrature_x(dim: usize) -> Result<FockOperator> {
    let a = annihilation(dim)?;
    let m = (a.matrix() + a.matrix().adjoint()) * Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    FockOperator::hermitian(m)
}

/// Quadrature P = i(a† − a)/√2.
pub fn quadrature_p(dim: usize) -> Result<FockOperator> {
    let a = annihilation(dim)?;
    let m = (a.matrix().adjoint() - a.matrix()) * Complex64::new(0.0, core::f64::consts::FRAC_1_SQRT_2);
    FockOperator::hermitian(m)
}

/// D(β) = exp(βa† − β*a), computed by Padé scaling and squaring.
pub fn displacement_operator(dim: usize, beta: Complex64) -> Result<FockOperator> {
    let a = annihilation(dim)?;
    let gen = a.matrix().adjoint() * beta - a.matrix() * beta.conj();
    Ok(FockOperator { mat: expm(&gen), hermitian: false })
}

/// Tr(op·ρ).
pub fn expectation(op: &FockOperator, rho: &DensityMatrix) -> Result<Complex64> {
    if op.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(op.dim(), rho.dim()));
    }
    Ok(trace_product(op.matrix(), rho.matrix()))
}

/// Tr(A·B) without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

const STATE_TOL: f64 = 1e-10;
const POSITIVITY_FLOOR: f64 = -1e-8;

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates trace, Hermiticity and positivity.
    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(mat.nrows(), mat.ncols()));
        }
        check_dim(mat.nrows())?;
        let tr = mat.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let defect = hermiticity_defect(&mat);
        if defect > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:e})")));
        }
        let rho = Self { mat };
        let lmin = rho.min_eigenvalue();
        if lmin < POSITIVITY_FLOOR {
            return Err(Error::InvalidState(format!("negative eigenvalue {lmin:e}")));
        }
        Ok(rho)
    }

    /// Hermitizes and trace-normalizes before validating.
    pub fn from_matrix_normalized(mut mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(mat.nrows(), mat.ncols()));
        }
        mat = (&mat + mat.adjoint()) * Complex64::new(0.5, 0.0);
        let tr = mat.trace().re;
        if !(tr.is_finite() && tr.abs() > 0.0) {
            return Err(Error::InvalidState(format!("trace {tr} cannot be normalized")));
        }
        mat /= Complex64::new(tr, 0.0);
        Self::from_matrix(mat)
    }

    pub fn pure(psi: &DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = psi / Complex64::new(norm, 0.0);
        Self::from_matrix_normalized(&v * v.adjoint())
    }

    pub fn fock(dim: usize, n: usize) -> Result<Self> {
        check_dim(dim)?;
        if n >= dim {
            return Err(Error::InvalidParameter(format!("Fock level {n} outside dimension {dim}")));
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(n, n)] = Complex64::new(1.0, 0.0);
        Ok(Self { mat: m })
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::fock(dim, 0)
    }

    /// D(β)|0⟩, renormalized after truncation.
    pub fn coherent(dim: usize, beta: Complex64) -> Result<Self> {
        let d = displacement_operator(dim, beta)?;
        let psi = d.matrix().column(0).into_owned();
        Self::pure(&psi)
    }

    /// Thermal state with mean occupation `nbar`, truncated and renormalized.
    pub fn thermal(dim: usize, nbar: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(nbar >= 0.0) {
            return Err(Error::InvalidParameter(format!("negative occupation {nbar}")));
        }
        let mut m = CMatrix::zeros(dim, dim);
        let r = nbar / (1.0 + nbar);
        let mut p = 1.0;
        for n in 0..dim {
            m[(n, n)] = Complex64::new(p, 0.0);
            p *= r;
        }
        Self::from_matrix_normalized(m)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = self.mat.clone().symmetric_eigen();
        eig.eigenvalues.iter().copied().collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Population of the highest Fock level, a cheap truncation diagnostic.
    pub fn top_population(&self) -> f64 {
        let n = self.dim();
        self.mat[(n - 1, n - 1)].re
    }

    /// ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let diff = &self.mat - &other.mat;
        let eig = diff.symmetric_eigen();
        Ok(0.5 * eig.eigenvalues.iter().map(|x| x.abs()).sum::<f64>())
    }

    /// Centered second moments N = ⟨a†a⟩ − |⟨a⟩|², M = ⟨a²⟩ − ⟨a⟩², and the mean ⟨a⟩.
    pub fn centered_moments(&self) -> (f64, Complex64, Complex64) {
        let n = self.dim();
        let mut mean = Complex64::new(0.0, 0.0);
        let mut m2 = Complex64::new(0.0, 0.0);
        let mut nn = 0.0;
        for k in 1..n {
            // Tr(a ρ) = Σ √k ρ[k, k-1]
            mean += self.mat[(k, k - 1)] * libm::sqrt(k as f64);
            nn += k as f64 * self.mat[(k, k)].re;
        }
        for k in 2..n {
            m2 += self.mat[(k, k - 2)] * libm::sqrt((k * (k - 1)) as f64);
        }
        (nn - mean.norm_sqr(), m2 - mean * mean, mean)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn smallest_annihilation() {
        let a = annihilation(2).unwrap();
        assert_eq!(a.matrix()[(0, 1)], c(1.0, 0.0));
        assert_eq!(a.matrix()[(0, 0)], c(0.0, 0.0));
        assert_eq!(a.matrix()[(1, 0)], c(0.0, 0.0));
        assert_eq!(a.matrix()[(1, 1)], c(0.0, 0.0));
        assert!(matches!(annihilation(1), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn number_from_ladder() {
        let a = annihilation(4).unwrap();
        let n = &a.adjoint() * &a;
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { i as f64 } else { 0.0 };
                assert_abs_diff_eq!(n.matrix()[(i, j)].re, want, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn truncated_commutator_corner() {
        let a = annihilation(10).unwrap();
        let comm = a.commutator(&a.adjoint());
        for i in 0..10 {
            let want = if i == 9 { -9.0 } else { 1.0 };
            assert_abs_diff_eq!(comm.matrix()[(i, i)].re, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn displaced_vacuum_mean() {
        let beta = c(1.0, 0.5);
        let d = displacement_operator(40, beta).unwrap();
        let a = annihilation(40).unwrap();
        let m = d.matrix().adjoint() * a.matrix() * d.matrix();
        assert!((m[(0, 0)] - beta).norm() < 1e-8);
        let rho = DensityMatrix::coherent(40, beta).unwrap();
        assert!((expectation(&a, &rho).unwrap() - beta).norm() < 1e-8);
    }

    #[test]
    fn displacement_identity_at_zero() {
        let d = displacement_operator(12, c(0.0, 0.0)).unwrap();
        assert!((d.matrix() - CMatrix::identity(12, 12)).norm() < 1e-15);
    }

    #[test]
    fn expectation_basics() {
        let rho = DensityMatrix::thermal(8, 0.7).unwrap();
        let id = FockOperator::identity(8).unwrap();
        assert_abs_diff_eq!(expectation(&id, &rho).unwrap().re, 1.0, epsilon = 1e-14);
        let vac = DensityMatrix::vacuum(8).unwrap();
        let n = number(8).unwrap();
        assert_abs_diff_eq!(expectation(&n, &vac).unwrap().norm(), 0.0);
        let wrong = DensityMatrix::vacuum(5).unwrap();
        assert!(matches!(expectation(&n, &wrong), Err(Error::DimensionMismatch(8, 5))));
    }

    #[test]
    fn density_validation() {
        let mut m = CMatrix::identity(3, 3);
        assert!(DensityMatrix::from_matrix(m.clone()).is_err());
        m /= c(3.0, 0.0);
        assert!(DensityMatrix::from_matrix(m.clone()).is_ok());
        m[(0, 0)] = c(-0.5, 0.0);
        m[(1, 1)] = c(1.5 - 1.0 / 3.0, 0.0);
        assert!(DensityMatrix::from_matrix(m).is_err());
    }

    #[test]
    fn hermitian_flag_rejects_non_hermitian() {
        let a = annihilation(3).unwrap();
        assert!(FockOperator::hermitian(a.matrix().clone()).is_err());
        assert!(quadrature_x(6).unwrap().is_hermitian());
    }

    #[test]
    fn coherent_centered_moments_vanish() {
        let rho = DensityMatrix::coherent(40, c(0.8, -0.3)).unwrap();
        let (n, m, mean) = rho.centered_moments();
        assert!(n.abs() < 1e-9 && m.norm() < 1e-9);
        assert!((mean - c(0.8, -0.3)).norm() < 1e-9);
    }
}

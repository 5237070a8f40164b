//! Liouvillian superoperators acting on column-stacked density matrices.
//!
//! vec(ρ)[m + nN] = ρ[m, n], so vec(AXB) = (Bᵀ ⊗ A) vec(X) and
//! L = −i(I⊗H − Hᵀ⊗I) + Σ_k r_k (c_k* ⊗ c_k − ½ I⊗c_k†c_k − ½ (c_k†c_k)ᵀ⊗I).

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{annihilation, CMatrix, DensityMatrix, FockOperator};
use crate::models::{build_hamiltonian, JpaModel};
use crate::ode::{DormandPrince, Tolerances};
use crate::sparse::{BandLu, CsrMatrix};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Debug)]
pub struct Liouvillian {
    dim: usize,
    matrix: CsrMatrix,
    hamiltonian: FockOperator,
    collapses: Vec<(FockOperator, f64)>,
}

pub fn build_liouvillian(h: &FockOperator, collapses: &[(FockOperator, f64)]) -> Result<Liouvillian> {
    let n = h.dim();
    for (c, r) in collapses {
        if c.dim() != n {
            return Err(Error::DimensionMismatch(n, c.dim()));
        }
        if !(*r >= 0.0) {
            return Err(Error::NegativeRate(*r));
        }
    }
    let mut trip = Vec::new();
    let left = |trip: &mut Vec<(usize, usize, Complex64)>, a: &FockOperator, s: Complex64| {
        // A X: (m,n) <- (k,n) with A[m,k]
        for (m, k, v) in a.nonzeros() {
            for col in 0..n {
                trip.push((m + col * n, k + col * n, s * v));
            }
        }
    };
    left(&mut trip, h, -I);
    let right = |trip: &mut Vec<(usize, usize, Complex64)>, b: &FockOperator, s: Complex64| {
        // X B: (m,n) <- (m,k) with B[k,n]
        for (k, col, v) in b.nonzeros() {
            for m in 0..n {
                trip.push((m + col * n, m + k * n, s * v));
            }
        }
    };
    right(&mut trip, h, I);
    for (c, rate) in collapses {
        if *rate == 0.0 {
            continue;
        }
        let r = Complex64::new(*rate, 0.0);
        let nz = c.nonzeros();
        // c X c†: (m,n) <- (k,l) with c[m,k] conj(c[n,l])
        for &(m, k, v) in &nz {
            for &(nn, l, w) in &nz {
                trip.push((m + nn * n, k + l * n, r * v * w.conj()));
            }
        }
        let cdc = &c.adjoint() * c;
        left(&mut trip, &cdc, -r * 0.5);
        right(&mut trip, &cdc, -r * 0.5);
    }
    let matrix = CsrMatrix::from_triplets(n * n, trip);
    Ok(Liouvillian { dim: n, matrix, hamiltonian: h.clone(), collapses: collapses.to_vec() })
}

/// Liouvillian of a pumped cavity damped at κ_tot into vacuum.
pub fn model_liouvillian(model: &JpaModel, dim: usize) -> Result<Liouvillian> {
    let h = build_hamiltonian(model, dim)?;
    let a = annihilation(dim)?;
    build_liouvillian(&h, &[(a, model.kappa_tot())])
}

pub fn vectorize(m: &CMatrix) -> Vec<Complex64> {
    // nalgebra storage is column-major, which is exactly column stacking
    m.as_slice().to_vec()
}

pub fn unvectorize(v: &[Complex64], dim: usize) -> CMatrix {
    DMatrix::from_column_slice(dim, dim, v)
}

fn trace_vec(v: &[Complex64], dim: usize) -> Complex64 {
    (0..dim).map(|m| v[m + m * dim]).sum()
}

impl Liouvillian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn hamiltonian(&self) -> &FockOperator {
        &self.hamiltonian
    }

    pub fn collapses(&self) -> &[(FockOperator, f64)] {
        &self.collapses
    }

    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.matrix.mul_vec_into(x, y);
    }

    /// max_j |Σ_m L[(m,m), j]|, zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let n = self.dim;
        let mut colsum = vec![ZERO; n * n];
        for m in 0..n {
            for (j, v) in self.matrix.row(m + m * n) {
                colsum[j] += v;
            }
        }
        colsum.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Dense copy of the superoperator, for small dimensions and tests.
    pub fn to_dense(&self) -> CMatrix {
        let nn = self.dim * self.dim;
        let mut d = CMatrix::zeros(nn, nn);
        for i in 0..nn {
            for (j, v) in self.matrix.row(i) {
                d[(i, j)] = v;
            }
        }
        d
    }
}

/// Steady state together with the factorization used to find it.
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// ‖L vec ρ‖_∞ / ‖L‖_∞.
    pub residual: f64,
    lu: BandLu,
    dim: usize,
}

impl SteadyState {
    /// Solves L Y = −X for traceless X and returns the traceless solution, i.e.
    /// Y = ∫₀^∞ e^{Lt} X dt.
    pub fn integrate_decay(&self, x: &CMatrix) -> Result<CMatrix> {
        let n = self.dim;
        if x.nrows() != n {
            return Err(Error::DimensionMismatch(n, x.nrows()));
        }
        let mut b: Vec<Complex64> = x.as_slice().iter().map(|v| -v).collect();
        b[0] = ZERO;
        self.lu.solve_in_place(&mut b);
        let tr = trace_vec(&b, n);
        let rho = self.rho.matrix();
        let mut y = unvectorize(&b, n);
        y -= rho * tr;
        Ok(y)
    }
}

/// Unique steady state by banded LU, with the (0,0) equation replaced by ρ₀₀ = 1
/// (the diagonal equations sum to zero, so one of them is redundant).
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    Ok(steady_state_full(l)?.rho)
}

pub fn steady_state_full(l: &Liouvillian) -> Result<SteadyState> {
    let n = l.dim;
    let one = [(0usize, Complex64::new(1.0, 0.0))];
    let lu = match BandLu::factor(&l.matrix, ZERO, Some((0, &one))) {
        Ok(lu) => lu,
        Err(Error::Singular) => return Err(Error::NonUniqueSteadyState(0.0)),
        Err(e) => return Err(e),
    };
    if lu.pivot_ratio() < 1e-12 {
        return Err(Error::NonUniqueSteadyState(lu.pivot_ratio()));
    }
    let mut b = vec![ZERO; n * n];
    b[0] = Complex64::new(1.0, 0.0);
    lu.solve_in_place(&mut b);
    let rho = DensityMatrix::from_matrix_normalized(unvectorize(&b, n))?;
    let v = vectorize(rho.matrix());
    let lv = l.matrix.mul_vec(&v);
    let residual = lv.iter().map(|z| z.norm()).fold(0.0, f64::max) / l.matrix.norm_inf().max(f64::MIN_POSITIVE);
    if residual > 1e-9 {
        return Err(Error::SteadyStateResidual(residual));
    }
    Ok(SteadyState { rho, residual, lu, dim: n })
}

/// Factorization of (L + s) for resolvent solves at complex shift s ≠ 0.
pub struct ShiftedResolvent {
    lu: BandLu,
    dim: usize,
}

impl ShiftedResolvent {
    pub fn new(l: &Liouvillian, shift: Complex64) -> Result<Self> {
        Ok(Self { lu: BandLu::factor(&l.matrix, shift, None)?, dim: l.dim })
    }

    /// Y = −(L + s)⁻¹ X = ∫₀^∞ e^{(L+s)t} X dt when Re s ≤ 0 contributions decay.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let mut b: Vec<Complex64> = x.as_slice().iter().map(|v| -v).collect();
        self.lu.solve_in_place(&mut b);
        unvectorize(&b, self.dim)
    }
}

/// e^{Lt} applied to an arbitrary matrix (not necessarily a state).
pub fn propagate_operator_kernel(l: &Liouvillian, m0: &CMatrix, t: f64) -> Result<CMatrix> {
    if m0.nrows() != l.dim || m0.ncols() != l.dim {
        return Err(Error::DimensionMismatch(l.dim, m0.nrows()));
    }
    if t < 0.0 {
        return Err(Error::InvalidParameter("propagation time must be nonnegative".into()));
    }
    let mut y = vectorize(m0);
    let mut ode = DormandPrince::new(y.len(), Tolerances::default());
    ode.integrate(&mut |_, x: &[Complex64], dx: &mut [Complex64]| l.apply(x, dx), 0.0, t, &mut y)?;
    Ok(unvectorize(&y, l.dim))
}

/// ρ(t) = e^{Lt} ρ₀.
pub fn evolve(l: &Liouvillian, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    let m = propagate_operator_kernel(l, rho0.matrix(), t)?;
    DensityMatrix::from_matrix_normalized(m)
}

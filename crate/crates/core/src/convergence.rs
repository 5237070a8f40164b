//! Fock-truncation convergence by dimension doubling.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::models::JpaModel;
use crate::outfield::StationaryCavity;

#[derive(Clone, Debug, PartialEq)]
pub struct Converged {
    /// Smallest tried dimension whose observables agree with the next doubling.
    pub dim: usize,
    pub values: Vec<f64>,
    /// Largest relative change between `dim` and `2·dim`.
    pub change: f64,
    pub tried: Vec<usize>,
}

pub fn relative_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let scale = x.abs().max(y.abs());
            if scale == 0.0 {
                0.0
            } else {
                (x - y).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Doubles the dimension from `start` until every observable returned by
/// `observe` moves by less than `rel_tol` relative; errors past `max_dim`.
pub fn converge_dim(
    start: usize,
    max_dim: usize,
    rel_tol: f64,
    mut observe: impl FnMut(usize) -> Result<Vec<f64>>,
) -> Result<Converged> {
    if start < 2 || max_dim < start {
        return Err(Error::InvalidParameter("need 2 ≤ start ≤ max_dim".into()));
    }
    let mut dim = start;
    let mut prev = observe(dim)?;
    let mut tried = alloc::vec![dim];
    while dim * 2 <= max_dim {
        let next = observe(dim * 2)?;
        tried.push(dim * 2);
        if next.len() != prev.len() {
            return Err(Error::InvalidParameter("observable count changed with dimension".into()));
        }
        let change = relative_change(&prev, &next);
        if change < rel_tol {
            return Ok(Converged { dim, values: prev, change, tried });
        }
        prev = next;
        dim *= 2;
    }
    Err(Error::NoConvergence(dim))
}

/// Grows the dimension by `step` from `start` until the steady-state
/// population of the highest Fock level is below `tail_tol`.
pub fn cavity_with_tail(model: &JpaModel, start: usize, step: usize, max_dim: usize, tail_tol: f64) -> Result<StationaryCavity> {
    if start < 2 || step == 0 || max_dim < start {
        return Err(Error::InvalidParameter("need 2 ≤ start ≤ max_dim and step > 0".into()));
    }
    let mut dim = start;
    loop {
        let cav = StationaryCavity::new(model, dim)?;
        if cav.rho().top_population().abs() < tail_tol {
            return Ok(cav);
        }
        if dim >= max_dim {
            return Err(Error::NoConvergence(dim));
        }
        dim = (dim + step).min(max_dim);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stops_at_first_stable_dimension() {
        let c = converge_dim(4, 256, 1e-6, |d| Ok(alloc::vec![1.0 + libm::exp(-(d as f64)), 2.0])).unwrap();
        assert_eq!(c.dim, 16);
        assert_eq!(c.tried, alloc::vec![4, 8, 16, 32]);
        assert!(c.change < 1e-6);
    }

    #[test]
    fn tail_rule_grows_with_pump() {
        let weak = JpaModel::dpa(0.0, num_complex::Complex64::new(0.2, 0.0), 1.0, 0.0).unwrap();
        let strong = JpaModel::dpa(0.0, num_complex::Complex64::new(0.425, 0.0), 1.0, 0.0).unwrap();
        let a = cavity_with_tail(&weak, 16, 16, 160, 1e-14).unwrap();
        let b = cavity_with_tail(&strong, 16, 16, 160, 1e-14).unwrap();
        assert!(b.dim() > a.dim());
        assert!(b.rho().top_population() < 1e-14);
        assert!(matches!(cavity_with_tail(&strong, 16, 16, 32, 1e-14), Err(Error::NoConvergence(32))));
    }

    #[test]
    fn reports_failure_past_max() {
        assert!(matches!(converge_dim(4, 32, 1e-6, |d| Ok(alloc::vec![d as f64])), Err(Error::NoConvergence(32))));
        assert!(converge_dim(8, 4, 1e-6, |_| Ok(alloc::vec![])).is_err());
    }
}

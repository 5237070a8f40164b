//! Adaptive Gauss–Kronrod (7/15) quadrature for complex integrands.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &mut impl FnMut(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

/// ∫_a^b f over `pieces` initial panels, bisecting the worst panel until the
/// summed error estimate is below max(abs_tol, rel_tol·|I|).
pub fn integrate(
    mut f: impl FnMut(f64) -> Complex64,
    a: f64,
    b: f64,
    pieces: usize,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Complex64> {
    let pieces = pieces.max(1);
    let mut heap = BinaryHeap::new();
    let width = (b - a) / pieces as f64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for i in 0..pieces {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == pieces { b } else { lo + width };
        let (value, e) = gk15(&mut f, lo, hi);
        total += value;
        err += e;
        heap.push(Panel { a: lo, b: hi, value, err: e });
    }
    for round in 0..20_000 {
        if err <= abs_tol.max(rel_tol * total.norm()) {
            return Ok(total);
        }
        if round % 1000 == 999 {
            // resum to keep the running totals free of drift
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.err).sum();
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::QuadratureNonConvergence);
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.err;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2 });
    }
    Err(Error::QuadratureNonConvergence)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_lorentzian() {
        let v = integrate(|x| Complex64::new(x * x * x - x, 1.0), 0.0, 2.0, 1, 1e-14, 1e-14).unwrap();
        assert!((v - Complex64::new(2.0, 2.0)).norm() < 1e-13);
        let v = integrate(|x| Complex64::new(1.0 / (1.0 + x * x), 0.0), -1e3, 1e3, 8, 1e-13, 1e-13).unwrap();
        assert!((v.re - 2.0 * libm::atan(1e3)).abs() < 1e-11);
    }
}

//! Compressed sparse rows and a banded LU factorization with partial pivoting.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl CsrMatrix {
    /// Square matrix from (row, col, value) triplets; duplicates are summed and exact zeros dropped.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            debug_assert!(r < n && c < n);
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
                last = Some((r, c));
            }
        }
        let mut k = 0;
        let (mut rows2, mut cols2, mut vals2) = (Vec::new(), Vec::new(), Vec::new());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != ZERO {
                rows2.push(r);
                cols2.push(c);
                vals2.push(v);
                k += 1;
            }
        }
        for &r in &rows2 {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        debug_assert_eq!(row_ptr[n], k);
        Self { n, row_ptr, cols: cols2, vals: vals2 }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.row(i).find(|&(c, _)| c == j).map_or(ZERO, |(_, v)| v)
    }

    /// y = A x
    pub fn mul_vec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        for i in 0..self.n {
            let mut acc = ZERO;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[i] = acc;
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// (lower, upper) bandwidths.
    pub fn bandwidths(&self) -> (usize, usize) {
        let (mut kl, mut ku) = (0, 0);
        for i in 0..self.n {
            for (j, _) in self.row(i) {
                if j < i {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        (kl, ku)
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }
}

/// LU factors of a band matrix, P A = L U, stored row-wise.
///
/// Row i keeps columns i−kl ..= i+kl+ku so that the upper factor has room for
/// the fill-in produced by row interchanges.
#[derive(Clone, Debug)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    rows: Vec<Complex64>,
    mult: Vec<Complex64>,
    piv: Vec<usize>,
    min_pivot: f64,
    max_pivot: f64,
}

impl BandLu {
    /// Factors `a` with rows replaced as given by `row_override` (row index, new sparse row).
    pub fn factor(a: &CsrMatrix, shift: Complex64, row_override: Option<(usize, &[(usize, Complex64)])>) -> Result<Self> {
        let n = a.dim();
        let (mut kl, mut ku) = a.bandwidths();
        if let Some((r, entries)) = row_override {
            for &(j, _) in entries {
                if j < r {
                    kl = kl.max(r - j);
                } else {
                    ku = ku.max(j - r);
                }
            }
        }
        let width = 2 * kl + ku + 1;
        let mut lu = Self {
            n,
            kl,
            ku,
            width,
            rows: vec![ZERO; n * width],
            mult: vec![ZERO; n * kl.max(1)],
            piv: vec![0; n],
            min_pivot: f64::INFINITY,
            max_pivot: 0.0,
        };
        for i in 0..n {
            match row_override {
                Some((r, entries)) if r == i => {
                    for &(j, v) in entries {
                        let off = lu.offset(i, j);
                        lu.rows[off] += v;
                    }
                }
                _ => {
                    for (j, v) in a.row(i) {
                        let off = lu.offset(i, j);
                        lu.rows[off] += v;
                    }
                    if shift != ZERO {
                        let off = lu.offset(i, i);
                        lu.rows[off] += shift;
                    }
                }
            }
        }
        lu.eliminate();
        if !(lu.min_pivot > 0.0) || lu.min_pivot < 1e-13 * lu.max_pivot {
            return Err(Error::Singular);
        }
        Ok(lu)
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    fn eliminate(&mut self) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.rows[self.offset(k, k)].norm();
            for i in (k + 1)..=last_row {
                let v = self.rows[self.offset(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            self.piv[k] = p;
            let last_col = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (ok, op) = (self.offset(k, j), self.offset(p, j));
                    self.rows.swap(ok, op);
                }
            }
            let pivot = self.rows[self.offset(k, k)];
            let pn = pivot.norm();
            self.min_pivot = self.min_pivot.min(pn);
            self.max_pivot = self.max_pivot.max(pn);
            if pn == 0.0 {
                continue;
            }
            let inv = pivot.inv();
            let len = last_col - k;
            for i in (k + 1)..=last_row {
                let oik = self.offset(i, k);
                let l = self.rows[oik] * inv;
                self.rows[oik] = ZERO;
                self.mult[k * kl + (i - k - 1)] = l;
                if l == ZERO {
                    continue;
                }
                let src = self.offset(k, k + 1);
                let dst = self.offset(i, k + 1);
                let (head, tail) = self.rows.split_at_mut(dst);
                let srow = &head[src..src + len];
                let drow = &mut tail[..len];
                for (d, s) in drow.iter_mut().zip(srow) {
                    *d -= l * *s;
                }
            }
        }
    }

    /// Ratio of smallest to largest pivot magnitude.
    pub fn pivot_ratio(&self) -> f64 {
        self.min_pivot / self.max_pivot
    }

    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != ZERO {
                for i in (k + 1)..=(k + kl).min(n - 1) {
                    b[i] -= self.mult[k * kl + (i - k - 1)] * bk;
                }
            }
        }
        for i in (0..n).rev() {
            let last = (i + kl + ku).min(n - 1);
            let mut s = b[i];
            let base = self.offset(i, i);
            for (t, j) in ((i + 1)..=last).enumerate() {
                s -= self.rows[base + 1 + t] * b[j];
            }
            b[i] = s / self.rows[base];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn triplets_merge_and_multiply() {
        let m = CsrMatrix::from_triplets(3, vec![(0, 1, c(1.0, 0.0)), (0, 1, c(2.0, 1.0)), (2, 0, c(-1.0, 0.0)), (1, 1, c(0.0, 0.0))]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), c(3.0, 1.0));
        let y = m.mul_vec(&[c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0)]);
        assert_eq!(y, vec![c(-1.0, 3.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(m.bandwidths(), (2, 1));
    }

    #[test]
    fn band_lu_matches_dense_solve() {
        // banded matrix needing row interchanges (small diagonal)
        let n = 40;
        let (kl, ku) = (3usize, 5usize);
        let mut trip = Vec::new();
        let mut dense = DMatrix::<Complex64>::zeros(n, n);
        let mut s = 7u64;
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                let x = (s >> 33) as f64 / (1u64 << 31) as f64 - 0.5;
                let v = if i == j { c(1e-3 * x, 0.1) } else { c(x, 0.3 * x) };
                trip.push((i, j, v));
                dense[(i, j)] = v;
            }
        }
        let a = CsrMatrix::from_triplets(n, trip);
        let b: Vec<Complex64> = (0..n).map(|i| c(i as f64, 1.0)).collect();
        let lu = BandLu::factor(&a, ZERO, None).unwrap();
        let mut x = b.clone();
        lu.solve_in_place(&mut x);
        let want = dense.lu().solve(&DVector::from_vec(b)).unwrap();
        for i in 0..n {
            assert!((x[i] - want[i]).norm() < 1e-9 * want.norm());
        }
    }

    #[test]
    fn singular_detected() {
        let a = CsrMatrix::from_triplets(3, vec![(0, 0, c(1.0, 0.0)), (1, 1, c(1.0, 0.0))]);
        assert!(matches!(BandLu::factor(&a, ZERO, None), Err(Error::Singular)));
    }
}

//! Matrix exponential by Padé scaling and squaring (Higham 2005).

use nalgebra::DMatrix;
use num_complex::Complex64;

type M = DMatrix<Complex64>;

const THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
];

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0, 2162160.0, 110880.0,
    3960.0, 90.0, 1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0, 10559470521600.0, 670442572800.0, 33522128640.0, 1323241920.0,
    40840800.0, 960960.0, 16380.0, 182.0, 1.0,
];

pub fn one_norm(a: &M) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Odd/even parts (U, V) of the degree-m Padé numerator for m ≤ 9.
fn pade_low(a: &M, b: &[f64]) -> (M, M) {
    let n = a.nrows();
    let id = M::identity(n, n);
    let a2 = a * a;
    let mut u = &id * r(b[1]);
    let mut v = &id * r(b[0]);
    let mut p = id.clone();
    let m = b.len() - 1;
    let mut k = 2;
    while k <= m {
        p = &p * &a2;
        v += &p * r(b[k]);
        if k + 1 <= m {
            u += &p * r(b[k + 1]);
        }
        k += 2;
    }
    (a * u, v)
}

fn pade13(a: &M) -> (M, M) {
    let n = a.nrows();
    let id = M::identity(n, n);
    let b = &B13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * r(b[13]) + &a4 * r(b[11]) + &a2 * r(b[9]);
    let u = a * (&a6 * inner_u + &a6 * r(b[7]) + &a4 * r(b[5]) + &a2 * r(b[3]) + &id * r(b[1]));
    let inner_v = &a6 * r(b[12]) + &a4 * r(b[10]) + &a2 * r(b[8]);
    let v = &a6 * inner_v + &a6 * r(b[6]) + &a4 * r(b[4]) + &a2 * r(b[2]) + &id * r(b[0]);
    (u, v)
}

fn solve(u: M, v: M) -> M {
    let p = &v + &u;
    let q = v - u;
    q.lu().solve(&p).expect("Padé denominator is nonsingular for the scaled argument")
}

/// e^A for a complex square matrix.
pub fn expm(a: &M) -> M {
    let n = a.nrows();
    if n == 0 {
        return a.clone();
    }
    let norm = one_norm(a);
    for &(m, theta) in &THETA[..4] {
        if norm <= theta {
            let (u, v) = match m {
                3 => pade_low(a, &B3),
                5 => pade_low(a, &B5),
                7 => pade_low(a, &B7),
                _ => pade_low(a, &B9),
            };
            return solve(u, v);
        }
    }
    let theta13 = THETA[4].1;
    let s = if norm > theta13 { libm::ceil(libm::log2(norm / theta13)) as i32 } else { 0 };
    let scaled = a * r(libm::exp2(-s as f64));
    let (u, v) = pade13(&scaled);
    let mut x = solve(u, v);
    for _ in 0..s {
        x = &x * &x;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taylor(a: &M) -> M {
        // squaring on top of a long Taylor series as an independent route
        let s = 8;
        let scaled = a * r(libm::exp2(-(s as f64)));
        let n = a.nrows();
        let mut term = M::identity(n, n);
        let mut sum = term.clone();
        for k in 1..40 {
            term = &term * &scaled / r(k as f64);
            sum += &term;
        }
        for _ in 0..s {
            sum = &sum * &sum;
        }
        sum
    }

    fn pseudo_random(n: usize, scale: f64, seed: u64) -> M {
        let mut state = seed;
        M::from_fn(n, n, |_, _| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let y = ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            Complex64::new(x * scale, y * scale)
        })
    }

    #[test]
    fn matches_taylor_across_norm_regimes() {
        for (i, scale) in [1e-3, 0.05, 0.3, 1.0, 3.0, 20.0].iter().enumerate() {
            let a = pseudo_random(7, *scale, i as u64 + 3);
            let e = expm(&a);
            let t = taylor(&a);
            let rel = (&e - &t).norm() / t.norm();
            assert!(rel < 1e-12, "scale {scale}: rel {rel:e}");
        }
    }

    #[test]
    fn diagonal_is_exact() {
        let a = M::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.0, 2.0),
            Complex64::new(-3.0, 0.5),
            Complex64::new(0.0, 0.0),
        ]));
        let e = expm(&a);
        for i in 0..3 {
            let want = a[(i, i)].exp();
            assert!((e[(i, i)] - want).norm() < 1e-13 * want.norm().max(1.0));
        }
    }

    #[test]
    fn inverse_property() {
        let a = pseudo_random(6, 4.0, 99);
        let prod = expm(&a) * expm(&(-&a));
        assert!((prod - M::identity(6, 6)).norm() < 1e-10);
    }
}

//! Normally ordered cumulants ⟨⟨D†ⁿD^m⟩⟩ of a single mode.
//!
//! Normally ordered moments behave like moments of a pair of commuting
//! variables (z*, z), so the bivariate moment-cumulant recursion applies:
//! μ_{n,m} = Σ_{i≤n, j≤m−1} C(n,i) C(m−1,j) κ_{n−i,m−j} μ_{i,j}.

use alloc::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::outfield::MomentSet;

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All cumulants κ_{n,m} with n + m ≤ `ms.order`.
pub fn cumulants(ms: &MomentSet) -> Result<BTreeMap<(usize, usize), Complex64>> {
    let order = ms.order;
    for k in 1..=order {
        for p in 0..=k {
            ms.get(p, k - p)?;
        }
    }
    let mu = |n: usize, m: usize| ms.moments[&(n, m)];
    let mut kap: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
    for k in 1..=order {
        for n in 0..=k {
            let m = k - n;
            let mut acc = mu(n, m);
            if m >= 1 {
                for i in 0..=n {
                    for j in 0..m {
                        if i == 0 && j == 0 {
                            continue;
                        }
                        acc -= kap[&(n - i, m - j)] * mu(i, j) * (binom(n, i) * binom(m - 1, j));
                    }
                }
            } else {
                for i in 1..n {
                    acc -= kap[&(n - i, 0)] * mu(i, 0) * binom(n - 1, i);
                }
            }
            kap.insert((n, m), acc);
        }
    }
    Ok(kap)
}

/// The cumulants reported for a filtered mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CumulantSummary {
    pub d: Complex64,
    pub dd_d: f64,
    pub d2: Complex64,
    pub d3: Complex64,
    pub dd_d2: Complex64,
    pub d4: Complex64,
    pub dd_d3: Complex64,
    pub dd2_d2: f64,
}

pub fn summary(ms: &MomentSet) -> Result<CumulantSummary> {
    if ms.order < 4 {
        return Err(Error::MissingMoment(2, 2));
    }
    let k = cumulants(ms)?;
    Ok(CumulantSummary {
        d: k[&(0, 1)],
        dd_d: k[&(1, 1)].re,
        d2: k[&(0, 2)],
        d3: k[&(0, 3)],
        dd_d2: k[&(1, 2)],
        d4: k[&(0, 4)],
        dd_d3: k[&(1, 3)],
        dd2_d2: k[&(2, 2)].re,
    })
}

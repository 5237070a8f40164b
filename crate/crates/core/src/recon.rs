//! Synthetic homodyne histograms and single-path moment reconstruction.
//!
//! A detected sample is S = √G_c (α + β*) with α drawn from the Husimi Q
//! function of the signal and β from the Glauber P function of a thermal noise
//! mode ĥ, so that
//! ⟨S*ⁿSᵐ⟩ = G_c^{(n+m)/2} Σ C(n,i)C(m,j) ⟨a†ⁱaʲ⟩⟨h^{n−i}h†^{m−j}⟩
//! once ⟨a†ⁱaʲ⟩ is read as the normally ordered signal moment. Histogram axes
//! are (Re S, Im S).
//!
//! Bin moments use bin centres with no Sheppard correction.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::cumulant::cumulants;
use crate::error::{Error, Result};
use crate::outfield::MomentSet;
use crate::phase_space::PhaseSpaceField;

pub const DEFAULT_BINS: usize = 256;
pub const DEFAULT_CHUNK: u64 = 1 << 20;
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Power gain in dB to a linear factor.
pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Source of complex amplitudes α distributed as the signal's Q function.
pub trait SignalSampler {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Complex64;
    /// Mean ⟨a⟩ and the largest quadrature variance of the sampled α
    /// (in |α|² units, i.e. E|δα|² split over two quadratures).
    fn spread(&self) -> (Complex64, f64);
}

/// Gaussian signal with mean ⟨a⟩ and centered normally ordered moments N, M.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianSignal {
    pub mean: Complex64,
    pub n: f64,
    pub m: Complex64,
    // Cholesky factor of the Q-function covariance of (Re δα, Im δα)
    l11: f64,
    l21: f64,
    l22: f64,
}

impl GaussianSignal {
    pub fn new(mean: Complex64, n: f64, m: Complex64) -> Result<Self> {
        if !(n >= 0.0) || m.norm_sqr() > n * (n + 1.0) * (1.0 + 1e-12) {
            return Err(Error::NonPositiveCovariance);
        }
        // Q function: E|δα|² = N + 1, E δα² = M
        let v = n + 1.0;
        let sxx = 0.5 * (v + m.re);
        let spp = 0.5 * (v - m.re);
        let sxp = 0.5 * m.im;
        if !(sxx > 0.0) {
            return Err(Error::NonPositiveCovariance);
        }
        let l11 = libm::sqrt(sxx);
        let l21 = sxp / l11;
        let d = spp - l21 * l21;
        if !(d > 0.0) {
            return Err(Error::NonPositiveCovariance);
        }
        Ok(Self { mean, n, m, l11, l21, l22: libm::sqrt(d) })
    }

    pub fn vacuum() -> Self {
        Self::new(Complex64::new(0.0, 0.0), 0.0, Complex64::new(0.0, 0.0)).unwrap_or_else(|_| unreachable!())
    }
}

impl SignalSampler for GaussianSignal {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Complex64 {
        let z1: f64 = StandardNormal.sample(rng);
        let z2: f64 = StandardNormal.sample(rng);
        self.mean + Complex64::new(self.l11 * z1, self.l21 * z1 + self.l22 * z2)
    }

    fn spread(&self) -> (Complex64, f64) {
        (self.mean, 0.5 * (self.n + 1.0 + self.m.norm()))
    }
}

/// Samples a tabulated non-negative density on a quadrature grid (for example
/// a Husimi Q function), picking a node by its weight and jittering uniformly
/// within the surrounding cell. The jitter adds dx²/12 to each quadrature variance.
#[derive(Clone, Debug)]
pub struct TabulatedSampler {
    cumulative: Vec<f64>,
    n_x: usize,
    x0: f64,
    p0: f64,
    dx: f64,
    dp: f64,
    mean: Complex64,
    var: f64,
}

impl TabulatedSampler {
    pub fn from_field(field: &PhaseSpaceField) -> Result<Self> {
        let g = field.grid;
        let mut cumulative = Vec::with_capacity(field.values.len());
        let mut acc = 0.0;
        for &v in &field.values {
            if v < -1e-12 {
                return Err(Error::InvalidParameter("tabulated density has negative values".into()));
            }
            acc += v.max(0.0);
            cumulative.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::InvalidParameter("tabulated density is zero".into()));
        }
        for c in &mut cumulative {
            *c /= acc;
        }
        let ([mx, mp], cov) = field.quadrature_moments();
        // quadratures (x, p) map to α = (x + ip)/√2
        let mean = Complex64::new(mx, mp) * core::f64::consts::FRAC_1_SQRT_2;
        let tr = cov[0][0] + cov[1][1];
        let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[0][1];
        let top = 0.5 * tr + libm::sqrt((0.25 * tr * tr - det).max(0.0));
        Ok(Self { cumulative, n_x: g.n_x, x0: g.x_min, p0: g.p_min, dx: g.dx(), dp: g.dp(), mean, var: 0.5 * top })
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl SignalSampler for TabulatedSampler {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Complex64 {
        let u = uniform(rng);
        let k = self.cumulative.partition_point(|&c| c < u).min(self.cumulative.len() - 1);
        let (i, j) = (k % self.n_x, k / self.n_x);
        let x = self.x0 + (i as f64 + uniform(rng) - 0.5) * self.dx;
        let p = self.p0 + (j as f64 + uniform(rng) - 0.5) * self.dp;
        Complex64::new(x, p) * core::f64::consts::FRAC_1_SQRT_2
    }

    fn spread(&self) -> (Complex64, f64) {
        (self.mean, self.var + libm::pow(self.dx.max(self.dp), 2.0) / 24.0)
    }
}

/// Thermal noise mode with occupancy n_h; its P function is Gaussian with E|β|² = n_h.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalNoise {
    pub occupancy: f64,
}

impl ThermalNoise {
    pub fn new(occupancy: f64) -> Result<Self> {
        if !(occupancy >= 0.0 && occupancy.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("noise occupancy {occupancy} must be ≥ 0")));
        }
        Ok(Self { occupancy })
    }

    /// Bose occupancy of an amplifier with noise temperature `kelvin` at `freq_hz`.
    pub fn from_noise_temperature(kelvin: f64, freq_hz: f64) -> Result<Self> {
        const H_OVER_K: f64 = 4.799_243_073_366_221e-11;
        if !(kelvin > 0.0 && freq_hz > 0.0) {
            return Err(Error::InvalidParameter("noise temperature and frequency must be positive".into()));
        }
        Self::new(1.0 / libm::expm1(H_OVER_K * freq_hz / kelvin))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Complex64 {
        if self.occupancy == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let s = libm::sqrt(0.5 * self.occupancy);
        let z1: f64 = StandardNormal.sample(rng);
        let z2: f64 = StandardNormal.sample(rng);
        Complex64::new(s * z1, s * z2)
    }

    /// ⟨hⁿh†ᵐ⟩ (antinormal order): (n_h + 1)ⁿ n! when n = m, else 0.
    pub fn antinormal_moment(&self, n: usize, m: usize) -> f64 {
        if n != m {
            return 0.0;
        }
        (1..=n).fold(1.0, |acc, k| acc * k as f64 * (self.occupancy + 1.0))
    }
}

/// 2-D bin layout over (Re S, Im S).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistogramGrid {
    pub nx: usize,
    pub np: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
}

impl HistogramGrid {
    pub fn new(nx: usize, np: usize, x_min: f64, x_max: f64, p_min: f64, p_max: f64) -> Result<Self> {
        let finite = [x_min, x_max, p_min, p_max].iter().all(|v| v.is_finite());
        if nx == 0 || np == 0 || !finite || x_max <= x_min || p_max <= p_min {
            return Err(Error::InvalidParameter("histogram grid needs bins and ordered finite bounds".into()));
        }
        Ok(Self { nx, np, x_min, x_max, p_min, p_max })
    }

    /// Square grid centered on zero that spans `sigmas` standard deviations of
    /// both the pump-on and pump-off distributions.
    pub fn covering(signal: &impl SignalSampler, noise: &ThermalNoise, gain_chain: f64, bins: usize, sigmas: f64) -> Result<Self> {
        let (mean, var) = signal.spread();
        let noise_var = 0.5 * noise.occupancy;
        let quad_std = libm::sqrt(gain_chain * (var.max(0.5) + noise_var));
        let half = libm::sqrt(gain_chain) * mean.norm() + sigmas * quad_std;
        Self::new(bins, bins, -half, half, -half, half)
    }

    pub fn bins(&self) -> usize {
        self.nx * self.np
    }

    fn index(&self, s: Complex64) -> Option<usize> {
        let fx = (s.re - self.x_min) / (self.x_max - self.x_min);
        let fp = (s.im - self.p_min) / (self.p_max - self.p_min);
        if !(0.0..1.0).contains(&fx) || !(0.0..1.0).contains(&fp) {
            return None;
        }
        let i = ((fx * self.nx as f64) as usize).min(self.nx - 1);
        let j = ((fp * self.np as f64) as usize).min(self.np - 1);
        Some(i * self.np + j)
    }

    /// Centre of bin `k` (row-major, x slow).
    pub fn center(&self, k: usize) -> Complex64 {
        let (i, j) = (k / self.np, k % self.np);
        let dx = (self.x_max - self.x_min) / self.nx as f64;
        let dp = (self.p_max - self.p_min) / self.np as f64;
        Complex64::new(self.x_min + (i as f64 + 0.5) * dx, self.p_min + (j as f64 + 0.5) * dp)
    }
}

/// Counts of S on a grid; `outside` counts samples that fell off the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct HomodyneHistogram {
    pub grid: HistogramGrid,
    pub counts: Vec<u64>,
    pub n_samples: u64,
    pub outside: u64,
    pub gain_chain: f64,
}

impl HomodyneHistogram {
    pub fn empty(grid: HistogramGrid, gain_chain: f64) -> Self {
        Self { grid, counts: vec![0; grid.bins()], n_samples: 0, outside: 0, gain_chain }
    }

    /// Adds another histogram on the same grid.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::InvalidParameter("histograms on different grids".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.n_samples += other.n_samples;
        self.outside += other.outside;
        Ok(())
    }

    /// ⟨S*ⁿSᵐ⟩ for n + m ≤ order from bin centres.
    pub fn moments(&self, order: usize) -> Result<BTreeMap<(usize, usize), Complex64>> {
        let table = MonomialTable::new(&self.grid, order);
        table.moments(&self.counts)
    }
}

/// Which histogram of the interleaved pair a sample stream belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PumpState {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthSpec {
    pub gain_chain: f64,
    pub noise: ThermalNoise,
    pub n_samples: u64,
    pub seed: u64,
    pub chunk_len: u64,
}

impl SynthSpec {
    pub fn new(gain_chain_db: f64, noise: ThermalNoise, n_samples: u64, seed: u64) -> Result<Self> {
        let gain_chain = db_to_linear(gain_chain_db);
        if !(gain_chain > 0.0 && gain_chain.is_finite()) {
            return Err(Error::InvalidParameter("chain gain must be finite".into()));
        }
        Ok(Self { gain_chain, noise, n_samples, seed, chunk_len: DEFAULT_CHUNK })
    }

    pub fn chunks(&self) -> u64 {
        self.n_samples.div_ceil(self.chunk_len.max(1))
    }
}

/// Histogram of one chunk; every (chunk, pump state) pair has its own ChaCha
/// stream so chunks can be generated in any order and merged.
pub fn synthesize_chunk(
    signal: &impl SignalSampler,
    spec: &SynthSpec,
    grid: &HistogramGrid,
    state: PumpState,
    chunk: u64,
) -> HomodyneHistogram {
    let vacuum = GaussianSignal::vacuum();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(2 * chunk + u64::from(state == PumpState::Off));
    let len = spec.chunk_len.max(1);
    let n = len.min(spec.n_samples.saturating_sub(chunk * len));
    let mut hist = HomodyneHistogram::empty(*grid, spec.gain_chain);
    let amp = libm::sqrt(spec.gain_chain);
    for _ in 0..n {
        let alpha = match state {
            PumpState::On => signal.sample(&mut rng),
            PumpState::Off => vacuum.sample(&mut rng),
        };
        let beta = spec.noise.sample(&mut rng);
        match grid.index((alpha + beta.conj()) * amp) {
            Some(k) => hist.counts[k] += 1,
            None => hist.outside += 1,
        }
    }
    hist.n_samples = n;
    hist
}

/// Serial pump-on / pump-off pair.
pub fn synthesize_homodyne(
    signal: &impl SignalSampler,
    spec: &SynthSpec,
    grid: &HistogramGrid,
) -> Result<(HomodyneHistogram, HomodyneHistogram)> {
    let mut on = HomodyneHistogram::empty(*grid, spec.gain_chain);
    let mut off = HomodyneHistogram::empty(*grid, spec.gain_chain);
    for c in 0..spec.chunks() {
        on.merge(&synthesize_chunk(signal, spec, grid, PumpState::On, c))?;
        off.merge(&synthesize_chunk(signal, spec, grid, PumpState::Off, c))?;
    }
    Ok((on, off))
}

/// Bin-centre monomials S*ⁿSᵐ, reused across bootstrap resamples.
struct MonomialTable {
    keys: Vec<(usize, usize)>,
    values: Vec<Vec<Complex64>>,
}

impl MonomialTable {
    fn new(grid: &HistogramGrid, order: usize) -> Self {
        let keys: Vec<(usize, usize)> =
            (1..=order).flat_map(|k| (0..=k).map(move |n| (n, k - n))).collect();
        let values = (0..grid.bins())
            .map(|b| {
                let s = grid.center(b);
                keys.iter().map(|&(n, m)| s.conj().powu(n as u32) * s.powu(m as u32)).collect()
            })
            .collect();
        Self { keys, values }
    }

    fn moments_weighted(&self, weights: impl Iterator<Item = f64>) -> Result<BTreeMap<(usize, usize), Complex64>> {
        let mut acc = vec![Complex64::new(0.0, 0.0); self.keys.len()];
        let mut total = 0.0;
        for (w, row) in weights.zip(&self.values) {
            if w == 0.0 {
                continue;
            }
            total += w;
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v * w;
            }
        }
        if !(total > 0.0) {
            return Err(Error::InvalidParameter("empty histogram".into()));
        }
        let mut out: BTreeMap<(usize, usize), Complex64> = self.keys.iter().zip(acc).map(|(&k, a)| (k, a / total)).collect();
        out.insert((0, 0), Complex64::new(1.0, 0.0));
        Ok(out)
    }

    fn moments(&self, counts: &[u64]) -> Result<BTreeMap<(usize, usize), Complex64>> {
        self.moments_weighted(counts.iter().map(|&c| c as f64))
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Signal moments ⟨a†ⁿaᵐ⟩ and noise moments ⟨hⁿh†ᵐ⟩ from the detected moments
/// of the two histograms, solving order by order.
pub fn reconstruct_from_moments(
    on: &BTreeMap<(usize, usize), Complex64>,
    off: &BTreeMap<(usize, usize), Complex64>,
    gain_chain: f64,
    order: usize,
) -> Result<(BTreeMap<(usize, usize), Complex64>, BTreeMap<(usize, usize), Complex64>)> {
    if !(gain_chain > 0.0) {
        return Err(Error::InvalidParameter("chain gain must be positive".into()));
    }
    let get = |map: &BTreeMap<(usize, usize), Complex64>, k: (usize, usize)| {
        map.get(&k).copied().ok_or(Error::MissingMoment(k.0, k.1))
    };
    let mut noise = BTreeMap::new();
    let mut signal = BTreeMap::new();
    noise.insert((0, 0), Complex64::new(1.0, 0.0));
    signal.insert((0, 0), Complex64::new(1.0, 0.0));
    for k in 1..=order {
        let scale = libm::pow(gain_chain, 0.5 * k as f64);
        for n in 0..=k {
            noise.insert((n, k - n), get(off, (n, k - n))? / scale);
        }
    }
    for k in 1..=order {
        let scale = libm::pow(gain_chain, 0.5 * k as f64);
        for n in 0..=k {
            let m = k - n;
            let mut acc = get(on, (n, m))? / scale;
            for i in 0..=n {
                for j in 0..=m {
                    if i == n && j == m {
                        continue;
                    }
                    acc -= signal[&(i, j)] * noise[&(n - i, m - j)] * (binom(m, j) * binom(n, i));
                }
            }
            signal.insert((n, m), acc);
        }
    }
    Ok((signal, noise))
}

/// Reconstructed signal moments with bootstrap errors.
#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructedMoments {
    pub order: usize,
    pub gain_chain: f64,
    pub moments: BTreeMap<(usize, usize), Complex64>,
    pub noise_moments: BTreeMap<(usize, usize), Complex64>,
    pub cumulants: BTreeMap<(usize, usize), Complex64>,
    /// Standard deviation over bootstrap resamples, empty without bootstrap.
    pub errors: BTreeMap<(usize, usize), f64>,
    pub cumulant_errors: BTreeMap<(usize, usize), f64>,
    /// Moments whose error exceeds half the natural scale (⟨a†a⟩ + 1)^{(n+m)/2}.
    pub flagged: Vec<(usize, usize)>,
    pub resamples: usize,
}

impl ReconstructedMoments {
    pub fn moment_set(&self) -> MomentSet {
        MomentSet { moments: self.moments.clone(), commutator: 1.0, order: self.order, steps: 0 }
    }

    pub fn squeezing_level(&self) -> Result<f64> {
        self.moment_set().squeezing_level()
    }
}

fn check_pair(on: &HomodyneHistogram, off: &HomodyneHistogram, order: usize) -> Result<()> {
    if on.grid != off.grid {
        return Err(Error::InvalidParameter("pump-on and pump-off histograms use different grids".into()));
    }
    if order == 0 || order > 4 {
        return Err(Error::OrderTooHigh(order));
    }
    Ok(())
}

/// Point reconstruction without error bars.
pub fn single_path_reconstruct(
    on: &HomodyneHistogram,
    off: &HomodyneHistogram,
    gain_chain: f64,
    order: usize,
) -> Result<ReconstructedMoments> {
    check_pair(on, off, order)?;
    let table = MonomialTable::new(&on.grid, order);
    point_estimate(&table, &on.counts, &off.counts, gain_chain, order)
}

fn point_estimate(table: &MonomialTable, on: &[u64], off: &[u64], gain_chain: f64, order: usize) -> Result<ReconstructedMoments> {
    let (moments, noise_moments) = reconstruct_from_moments(&table.moments(on)?, &table.moments(off)?, gain_chain, order)?;
    let ms = MomentSet { moments: moments.clone(), commutator: 1.0, order, steps: 0 };
    Ok(ReconstructedMoments {
        order,
        gain_chain,
        moments,
        noise_moments,
        cumulants: cumulants(&ms)?,
        errors: BTreeMap::new(),
        cumulant_errors: BTreeMap::new(),
        flagged: Vec::new(),
        resamples: 0,
    })
}

fn poisson_resample(counts: &[u64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    counts
        .iter()
        .map(|&c| match Poisson::new(c as f64) {
            Ok(d) if c > 0 => d.sample(rng),
            _ => 0.0,
        })
        .collect()
}

fn spread_of(samples: &[BTreeMap<(usize, usize), Complex64>], center: &BTreeMap<(usize, usize), Complex64>) -> BTreeMap<(usize, usize), f64> {
    let n = samples.len() as f64;
    center
        .keys()
        .map(|k| {
            let mean = samples.iter().map(|s| s[k]).sum::<Complex64>() / n;
            let var = samples.iter().map(|s| (s[k] - mean).norm_sqr()).sum::<f64>() / (n - 1.0).max(1.0);
            (*k, libm::sqrt(var))
        })
        .collect()
}

/// Reconstruction with Poisson-bootstrap errors: each bin count c is redrawn
/// as Poisson(c) in both histograms, `resamples` times.
pub fn bootstrap_reconstruct(
    on: &HomodyneHistogram,
    off: &HomodyneHistogram,
    gain_chain: f64,
    order: usize,
    resamples: usize,
    seed: u64,
) -> Result<ReconstructedMoments> {
    check_pair(on, off, order)?;
    if resamples < 2 {
        return Err(Error::InvalidParameter("bootstrap needs at least 2 resamples".into()));
    }
    let table = MonomialTable::new(&on.grid, order);
    let mut out = point_estimate(&table, &on.counts, &off.counts, gain_chain, order)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut moment_draws = Vec::with_capacity(resamples);
    let mut cumulant_draws = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let won = poisson_resample(&on.counts, &mut rng);
        let woff = poisson_resample(&off.counts, &mut rng);
        let (sig, _) = reconstruct_from_moments(
            &table.moments_weighted(won.into_iter())?,
            &table.moments_weighted(woff.into_iter())?,
            gain_chain,
            order,
        )?;
        let ms = MomentSet { moments: sig.clone(), commutator: 1.0, order, steps: 0 };
        cumulant_draws.push(cumulants(&ms)?);
        moment_draws.push(sig);
    }
    out.errors = spread_of(&moment_draws, &out.moments);
    out.cumulant_errors = spread_of(&cumulant_draws, &out.cumulants);
    let base = out.moments[&(1, 1)].re.max(0.0) + 1.0;
    out.flagged = out
        .errors
        .iter()
        .filter(|(&(n, m), &e)| e > 0.5 * libm::pow(base, 0.5 * (n + m) as f64))
        .map(|(&k, _)| k)
        .collect();
    out.resamples = resamples;
    Ok(out)
}

/// Cumulants of a reconstruction.
pub fn histogram_cumulants(rm: &ReconstructedMoments) -> BTreeMap<(usize, usize), Complex64> {
    rm.cumulants.clone()
}

/// Squeezing levels reconstructed with the chain gain shifted by ±`delta_db`.
/// Returns (low-gain, nominal, high-gain) levels.
pub fn gain_calibration_band(
    on: &HomodyneHistogram,
    off: &HomodyneHistogram,
    gain_chain_db: f64,
    delta_db: f64,
) -> Result<(f64, f64, f64)> {
    let level = |db: f64| single_path_reconstruct(on, off, db_to_linear(db), 2)?.squeezing_level();
    Ok((level(gain_chain_db - delta_db)?, level(gain_chain_db)?, level(gain_chain_db + delta_db)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn noiseless_unit_gain_reduces_to_raw_moments() {
        // vacuum off-histogram moments: ⟨S*S⟩ = 1 (antinormal vacuum), ⟨S*²S²⟩ = 2
        let mut off = BTreeMap::new();
        for k in 1..=4usize {
            for n in 0..=k {
                let v = if n == k - n { (1..=n).product::<usize>() as f64 } else { 0.0 };
                off.insert((n, k - n), c(v, 0.0));
            }
        }
        let on = off.clone();
        let (sig, noise) = reconstruct_from_moments(&on, &off, 1.0, 4).unwrap();
        for (k, v) in &sig {
            let want = if *k == (0, 0) { 1.0 } else { 0.0 };
            assert!((v - want).norm() < 1e-14, "{k:?} {v}");
        }
        assert_eq!(noise[&(2, 2)], c(2.0, 0.0));
    }

    #[test]
    fn thermal_antinormal_moments() {
        let h = ThermalNoise::new(2.0).unwrap();
        assert_eq!(h.antinormal_moment(1, 1), 3.0);
        assert_eq!(h.antinormal_moment(2, 2), 18.0);
        assert_eq!(h.antinormal_moment(1, 2), 0.0);
        let n = ThermalNoise::from_noise_temperature(4.0, 7.5e9).unwrap().occupancy;
        assert!(n > 10.0 && n < 11.5, "{n}");
    }

    #[test]
    fn unphysical_gaussian_rejected() {
        assert_eq!(GaussianSignal::new(c(0.0, 0.0), 1.0, c(1.5, 0.0)), Err(Error::NonPositiveCovariance));
        assert!(GaussianSignal::new(c(0.0, 0.0), 1.3, c(0.0, 1.53)).is_ok());
    }

    #[test]
    fn grid_indexing_round_trips() {
        let g = HistogramGrid::new(4, 8, -1.0, 1.0, -2.0, 2.0).unwrap();
        for k in 0..g.bins() {
            assert_eq!(g.index(g.center(k)), Some(k));
        }
        assert_eq!(g.index(c(1.0, 0.0)), None);
    }
}

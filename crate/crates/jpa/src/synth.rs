//! Chunk-parallel homodyne synthesis. Each chunk has its own RNG stream, so
//! the merged histograms equal the serial ones bit for bit.

use jpa_core::recon::{synthesize_chunk, HistogramGrid, HomodyneHistogram, PumpState, SignalSampler, SynthSpec};
use rayon::prelude::*;

use crate::error::CliResult;

pub fn synthesize_parallel<S: SignalSampler + Sync>(
    signal: &S,
    spec: &SynthSpec,
    grid: &HistogramGrid,
) -> CliResult<(HomodyneHistogram, HomodyneHistogram)> {
    let parts: Vec<(HomodyneHistogram, HomodyneHistogram)> = (0..spec.chunks())
        .into_par_iter()
        .map(|c| {
            (
                synthesize_chunk(signal, spec, grid, PumpState::On, c),
                synthesize_chunk(signal, spec, grid, PumpState::Off, c),
            )
        })
        .collect();
    let mut on = HomodyneHistogram::empty(*grid, spec.gain_chain);
    let mut off = HomodyneHistogram::empty(*grid, spec.gain_chain);
    for (a, b) in &parts {
        on.merge(a)?;
        off.merge(b)?;
    }
    Ok((on, off))
}

#[cfg(test)]
mod tests {
    use super::*;
    use jpa_core::recon::{synthesize_homodyne, GaussianSignal, ThermalNoise};
    use jpa_core::Complex64;

    #[test]
    fn parallel_equals_serial() {
        let sig = GaussianSignal::new(Complex64::new(0.2, 0.0), 1.3, Complex64::new(0.0, 1.53)).unwrap();
        let mut spec = SynthSpec::new(20.0, ThermalNoise::new(3.0).unwrap(), 250_000, 17).unwrap();
        spec.chunk_len = 40_000;
        let grid = HistogramGrid::covering(&sig, &spec.noise, spec.gain_chain, 64, 8.0).unwrap();
        assert_eq!(synthesize_parallel(&sig, &spec, &grid).unwrap(), synthesize_homodyne(&sig, &spec, &grid).unwrap());
    }
}

//! Flat binary histogram files, CSV export and JSON for reconstruction
//! results.
//!
//! Binary layout, all little-endian:
//!
//! | bytes | field |
//! |-------|-------|
//! | 8 | magic `JPAHIST1` |
//! | 4 + 4 | `nx`, `np` (u32) |
//! | 4 × 8 | `x_min`, `x_max`, `p_min`, `p_max` (f64) |
//! | 8 | chain gain G_c, linear power (f64) |
//! | 8 + 8 | `n_samples`, `outside` (u64) |
//! | 8 · nx · np | counts (u64), row-major with x slow |

use std::fs;
use std::path::Path;

use jpa_core::recon::{HistogramGrid, HomodyneHistogram, ReconstructedMoments};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::table::{Cell, Table};

pub const MAGIC: &[u8; 8] = b"JPAHIST1";
const HEADER_LEN: usize = 8 + 8 + 32 + 8 + 16;

pub fn encode(h: &HomodyneHistogram) -> CliResult<Vec<u8>> {
    let g = &h.grid;
    let nx = u32::try_from(g.nx).map_err(|_| CliError::Format("nx does not fit in u32".into()))?;
    let np = u32::try_from(g.np).map_err(|_| CliError::Format("np does not fit in u32".into()))?;
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * h.counts.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&nx.to_le_bytes());
    out.extend_from_slice(&np.to_le_bytes());
    for v in [g.x_min, g.x_max, g.p_min, g.p_max, h.gain_chain] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&h.n_samples.to_le_bytes());
    out.extend_from_slice(&h.outside.to_le_bytes());
    for c in &h.counts {
        out.extend_from_slice(&c.to_le_bytes());
    }
    Ok(out)
}

fn take<const N: usize>(bytes: &[u8], at: &mut usize) -> CliResult<[u8; N]> {
    let s = bytes.get(*at..*at + N).ok_or_else(|| CliError::Format("truncated file".into()))?;
    *at += N;
    Ok(s.try_into().expect("slice length"))
}

pub fn decode(bytes: &[u8]) -> CliResult<HomodyneHistogram> {
    if bytes.get(..8) != Some(MAGIC.as_slice()) {
        return Err(CliError::Format("bad magic".into()));
    }
    let mut at = 8;
    let nx = u32::from_le_bytes(take(bytes, &mut at)?) as usize;
    let np = u32::from_le_bytes(take(bytes, &mut at)?) as usize;
    let mut f = [0.0; 5];
    for v in &mut f {
        *v = f64::from_le_bytes(take(bytes, &mut at)?);
    }
    let n_samples = u64::from_le_bytes(take(bytes, &mut at)?);
    let outside = u64::from_le_bytes(take(bytes, &mut at)?);
    let grid = HistogramGrid::new(nx, np, f[0], f[1], f[2], f[3])?;
    let want = HEADER_LEN + 8 * grid.bins();
    if bytes.len() != want {
        return Err(CliError::Format(format!("expected {want} bytes, found {}", bytes.len())));
    }
    let counts: Vec<u64> = bytes[HEADER_LEN..].chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().expect("chunk"))).collect();
    let total: u64 = counts.iter().sum::<u64>() + outside;
    if total != n_samples {
        return Err(CliError::Format(format!("counts sum to {total}, header says {n_samples}")));
    }
    Ok(HomodyneHistogram { grid, counts, n_samples, outside, gain_chain: f[4] })
}

pub fn write(path: &Path, h: &HomodyneHistogram) -> CliResult<()> {
    fs::write(path, encode(h)?).map_err(|e| CliError::io(path, e))
}

pub fn read(path: &Path) -> CliResult<HomodyneHistogram> {
    decode(&fs::read(path).map_err(|e| CliError::io(path, e))?)
}

/// Nonzero bins as (V_X, V_P, count) rows at bin centers.
pub fn to_table(h: &HomodyneHistogram) -> Table {
    let mut t = Table::new(&["v_x", "v_p", "count"]);
    t.meta("n_samples", h.n_samples).meta("outside", h.outside).meta("gain_chain_linear", format!("{:?}", h.gain_chain));
    for (k, &c) in h.counts.iter().enumerate().filter(|(_, &c)| c > 0) {
        let z = h.grid.center(k);
        t.push(vec![Cell::Num(z.re), Cell::Num(z.im), Cell::Int(c as i64)]);
    }
    t
}

fn moment_list(
    m: &std::collections::BTreeMap<(usize, usize), jpa_core::Complex64>,
    err: &std::collections::BTreeMap<(usize, usize), f64>,
) -> Value {
    Value::Array(
        m.iter()
            .map(|(&(n, k), v)| json!({ "n": n, "m": k, "re": v.re, "im": v.im, "error": err.get(&(n, k)).copied() }))
            .collect(),
    )
}

/// JSON document for a reconstruction, with the optional gain band as
/// (low-gain, nominal, high-gain) squeezing levels.
pub fn reconstruction_json(rm: &ReconstructedMoments, band: Option<(f64, f64, f64)>) -> CliResult<String> {
    let none = Default::default();
    let doc = json!({
        "order": rm.order,
        "gain_chain_linear": rm.gain_chain,
        "resamples": rm.resamples,
        "moments": moment_list(&rm.moments, &rm.errors),
        "cumulants": moment_list(&rm.cumulants, &rm.cumulant_errors),
        "noise_moments": moment_list(&rm.noise_moments, &none),
        "flagged": rm.flagged.iter().map(|&(n, m)| json!([n, m])).collect::<Vec<_>>(),
        "squeezing_level": rm.squeezing_level().ok(),
        "gain_band": band.map(|(lo, mid, hi)| json!({ "low_gain": lo, "nominal": mid, "high_gain": hi })),
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

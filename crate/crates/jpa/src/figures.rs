//! Data behind the published figures at desk-scale resolution.
//!
//! Unless noted, κ/2π = 50 MHz, Δ = γ = 0, and filtered quantities use a
//! 256 ns boxcar. Grids are our own choice since the published ones are not
//! tabulated; `Resolution::Quick` keeps only a few points per curve.

use std::f64::consts::PI;
use std::str::FromStr;

use jpa_core::characterization::{
    dpa_deviation, induced_displacement_ratio, lambda_for_numeric_gain, metrology, optimal_phases, GainKind,
};
use jpa_core::convergence::cavity_with_tail;
use jpa_core::dpa::{self, DpaParams};
use jpa_core::filter::FilterSpec;
use jpa_core::models::JpaModel;
use jpa_core::ode::Tolerances;
use jpa_core::outfield::{to_db, StationaryCavity};
use jpa_core::Complex64;
use rayon::prelude::*;

use crate::config::kappa_50mhz;
use crate::error::{error_code, CliError, CliResult};
use crate::table::{Cell, Table};

pub const FIGURES: &[&str] = &["fig2a", "fig2b", "fig4", "fig5", "fig6", "fig7ab", "fig8a", "fig8b", "fig10"];

const BOXCAR_US: f64 = 0.256;
const START_DIM: usize = 24;
const DIM_STEP: usize = 16;
const MAX_DIM: usize = 200;
const TAIL_TOL: f64 = 1e-12;
const PHASE_GRID: usize = 720;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    Fig2a,
    Fig2b,
    Fig4,
    Fig5,
    Fig6,
    Fig7ab,
    Fig8a,
    Fig8b,
    Fig10,
}

impl FromStr for Figure {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s {
            "fig2a" => Figure::Fig2a,
            "fig2b" => Figure::Fig2b,
            "fig4" => Figure::Fig4,
            "fig5" => Figure::Fig5,
            "fig6" => Figure::Fig6,
            "fig7ab" => Figure::Fig7ab,
            "fig8a" => Figure::Fig8a,
            "fig8b" => Figure::Fig8b,
            "fig10" => Figure::Fig10,
            _ => return Err(CliError::UnknownFigure(s.to_string())),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolution {
    Desk,
    Quick,
}

impl Resolution {
    fn pick<T: Clone>(self, desk: &[T], quick: &[T]) -> Vec<T> {
        match self {
            Resolution::Desk => desk.to_vec(),
            Resolution::Quick => quick.to_vec(),
        }
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1).max(1) as f64).collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a, b, n).into_iter().map(|e| 10f64.powf(e)).collect()
}

pub fn generate(fig: Figure, res: Resolution) -> CliResult<Table> {
    let mut t = match fig {
        Figure::Fig2a | Figure::Fig2b => fig2(fig, res)?,
        Figure::Fig4 => fig4(res)?,
        Figure::Fig5 => fig5(res)?,
        Figure::Fig6 => fig6(res)?,
        Figure::Fig7ab => fig7ab(res)?,
        Figure::Fig8a => fig8a(res)?,
        Figure::Fig8b => fig8b(res)?,
        Figure::Fig10 => fig10(res)?,
    };
    t.meta("resolution", format!("{res:?}").to_lowercase());
    Ok(t)
}

fn cavity(model: &JpaModel) -> jpa_core::Result<StationaryCavity> {
    cavity_with_tail(model, START_DIM, DIM_STEP, MAX_DIM, TAIL_TOL)
}

fn real_pump(ratio: f64, kappa_tot: f64) -> Complex64 {
    Complex64::new(ratio * 0.5 * kappa_tot, 0.0)
}

fn status(r: &jpa_core::Result<Vec<f64>>) -> Cell {
    Cell::text(r.as_ref().err().map_or("ok", error_code))
}

fn cells(r: jpa_core::Result<Vec<f64>>, width: usize) -> Vec<Cell> {
    match r {
        Ok(v) => v.into_iter().map(Cell::Num).collect(),
        Err(_) => vec![Cell::Num(f64::NAN); width],
    }
}

/// Finds the pump giving `db` of numerical gain, re-solving at the dimension
/// the tail rule asks for until the two agree.
fn pump_for_gain(template: &JpaModel, db: f64, kind: GainKind) -> jpa_core::Result<(JpaModel, StationaryCavity)> {
    let mut dim = 48;
    loop {
        let model = lambda_for_numeric_gain(template, db, kind, dim)?;
        let cav = cavity_with_tail(&model, dim, DIM_STEP, MAX_DIM, TAIL_TOL)?;
        if cav.dim() == dim {
            return Ok((model, cav));
        }
        dim = cav.dim();
    }
}

fn squeezing_db(cav: &StationaryCavity, filter: &FilterSpec) -> jpa_core::Result<f64> {
    Ok(to_db(cav.filtered_moments(filter, 2, Tolerances::default())?.squeezing_level()?))
}

fn dpa_filtered_db(p: &DpaParams, filter: &FilterSpec) -> jpa_core::Result<f64> {
    let f = dpa::filtered_moments(p, filter)?;
    Ok(to_db(jpa_core::outfield::squeezing_level(f.n, f.m)?))
}

fn fig2(fig: Figure, res: Resolution) -> CliResult<Table> {
    let kappa = kappa_50mhz();
    let ratios = match res {
        Resolution::Desk => logspace(-4.0, -2.0, 9),
        Resolution::Quick => vec![1e-4, 1e-2],
    };
    let lam = real_pump(0.85, kappa);
    let rows: Vec<(f64, jpa_core::Result<Vec<f64>>)> = ratios
        .par_iter()
        .map(|&r| {
            let kerr = -r * kappa;
            let run = || -> jpa_core::Result<Vec<f64>> {
                let models = [
                    JpaModel::mono_current(0.0, lam, kerr, kappa, 0.0)?,
                    JpaModel::bi_current(0.0, lam, kerr, kappa, 0.0, 100.0 * kappa)?,
                    JpaModel::flux(0.0, lam, kerr, kappa, 0.0)?,
                ];
                let mut disp = Vec::new();
                let mut xi = Vec::new();
                for m in &models {
                    let cav = cavity(m)?;
                    disp.push(induced_displacement_ratio(m, cav.rho()));
                    xi.push(dpa_deviation(cav.rho()));
                }
                Ok(if fig == Figure::Fig2a { disp } else { vec![xi[0], xi[1], xi[2], xi[0] / xi[1]] })
            };
            (r, run())
        })
        .collect();
    let (mut t, width) = if fig == Figure::Fig2a {
        (Table::new(&["kerr_over_kappa", "displacement_mono", "displacement_bi", "displacement_flux", "status"]), 3)
    } else {
        (Table::new(&["kerr_over_kappa", "xi_mono", "xi_bi", "xi_flux", "xi_mono_over_bi", "status"]), 4)
    };
    t.meta("figure", if fig == Figure::Fig2a { "fig2a" } else { "fig2b" })
        .meta("kappa", kappa)
        .meta("pump", "lambda = 0.85 lambda_crit, real; detuning = gamma = 0")
        .meta("kerr", "Lambda = -kerr_over_kappa * kappa");
    for (r, v) in rows {
        let s = status(&v);
        let mut row = vec![Cell::Num(r)];
        row.extend(cells(v, width));
        row.push(s);
        t.push(row);
    }
    Ok(t)
}

const GAIN_COLUMNS: &[&str] = &["kerr_over_kappa", "pump_ratio", "dim", "G_dpa_dB", "G_pp_dB", "G11_sq", "G22_sq", "G12_sq", "G21_sq", "eta_pp", "eta_pp_limit", "status"];

/// Bichromatic (equivalently flux) Kerr model on a pump grid.
fn gain_sweep(res: Resolution, name: &str) -> CliResult<Table> {
    let kappa = kappa_50mhz();
    let kerrs = [1e-4, 1e-3, 1e-2];
    let pumps = match res {
        Resolution::Desk => linspace(0.1, 0.9, 9),
        Resolution::Quick => vec![0.3, 0.7],
    };
    let points: Vec<(f64, f64)> = kerrs.iter().flat_map(|&k| pumps.iter().map(move |&r| (k, r))).collect();
    let rows: Vec<(f64, f64, jpa_core::Result<Vec<f64>>)> = points
        .par_iter()
        .map(|&(k, r)| {
            let run = || -> jpa_core::Result<Vec<f64>> {
                let lam = real_pump(r, kappa);
                let m = JpaModel::bi_current(0.0, lam, -k * kappa, kappa, 0.0, 100.0 * kappa)?;
                let cav = cavity(&m)?;
                let met = metrology(&cav)?;
                let g = met.gain;
                let g_dpa = dpa::phase_preserving_gain(&DpaParams::new(0.0, lam, kappa, 0.0)?, 0.0);
                Ok(vec![
                    cav.dim() as f64,
                    to_db(g_dpa),
                    to_db(met.gain_pp),
                    g.g(1, 1).powi(2),
                    g.g(2, 2).powi(2),
                    g.g(1, 2).powi(2),
                    g.g(2, 1).powi(2),
                    met.eta_pp,
                    met.gain_pp / (2.0 * met.gain_pp - 1.0),
                ])
            };
            (k, r, run())
        })
        .collect();
    let mut t = Table::new(GAIN_COLUMNS);
    t.meta("figure", name)
        .meta("kappa", kappa)
        .meta("model", "bichromatic current pump (Kerr correction only), Lambda = -kerr_over_kappa * kappa, omega = detuning = gamma = 0")
        .meta("gain", "G11_sq etc. are squared quadrature gain-matrix elements; G_pp is the phase-preserving photon-number gain");
    for (k, r, v) in rows {
        let s = status(&v);
        let mut row = vec![Cell::Num(k), Cell::Num(r)];
        row.extend(cells(v, 9));
        row.push(s);
        t.push(row);
    }
    Ok(t)
}

fn fig4(res: Resolution) -> CliResult<Table> {
    gain_sweep(res, "fig4")
}

fn fig5(res: Resolution) -> CliResult<Table> {
    gain_sweep(res, "fig5")
}

fn kerr_template(kerr_over_kappa: f64, kappa: f64) -> jpa_core::Result<JpaModel> {
    JpaModel::bi_current(0.0, real_pump(0.3, kappa), -kerr_over_kappa * kappa, kappa, 0.0, 100.0 * kappa)
}

fn fig6(res: Resolution) -> CliResult<Table> {
    let kappa = kappa_50mhz();
    let kerrs = [1e-3, 3e-3, 1e-2];
    let n_theta = match res {
        Resolution::Desk => 181,
        Resolution::Quick => 7,
    };
    let solved: Vec<jpa_core::Result<(f64, jpa_core::characterization::Metrology)>> = kerrs
        .par_iter()
        .map(|&k| {
            let (m, cav) = pump_for_gain(&kerr_template(k, kappa)?, 23.0, GainKind::PhaseSensitive)?;
            Ok((m.pump_ratio(), metrology(&cav)?))
        })
        .collect();
    let mut t = Table::new(&["kerr_over_kappa", "pump_ratio", "theta", "eta_theta", "G11", "G12", "status"]);
    t.meta("figure", "fig6")
        .meta("kappa", kappa)
        .meta("gain", "phase-sensitive photon-number gain max_theta G11(theta)^2 = 23 dB")
        .meta("theta", "G(theta) = R(theta)^T G R(theta), R = [[cos, -sin], [sin, cos]]");
    for (&k, s) in kerrs.iter().zip(solved) {
        match s {
            Ok((r, met)) => {
                for theta in linspace(0.0, PI, n_theta) {
                    let gr = met.gain.rotated(theta);
                    t.push(vec![k.into(), r.into(), theta.into(), met.eta_theta(theta).into(), gr.g(1, 1).into(), gr.g(1, 2).into(), "ok".into()]);
                }
            }
            Err(e) => t.push(vec![k.into(), Cell::Num(f64::NAN), Cell::Num(f64::NAN), Cell::Num(f64::NAN), Cell::Num(f64::NAN), Cell::Num(f64::NAN), Cell::text(error_code(&e))]),
        }
    }
    Ok(t)
}

fn fig7ab(res: Resolution) -> CliResult<Table> {
    let kappa = kappa_50mhz();
    let gains = res.pick(&[10.0, 15.0, 20.0, 23.0, 25.0], &[15.0, 25.0]);
    let kerrs = [1e-3, 1e-2];
    let points: Vec<(f64, f64)> = kerrs.iter().flat_map(|&k| gains.iter().map(move |&g| (k, g))).collect();
    let rows: Vec<(f64, f64, jpa_core::Result<Vec<f64>>)> = points
        .par_iter()
        .map(|&(k, db)| {
            let run = || -> jpa_core::Result<Vec<f64>> {
                let (m, cav) = pump_for_gain(&kerr_template(k, kappa)?, db, GainKind::PhaseSensitive)?;
                let met = metrology(&cav)?;
                let (tm, to) = optimal_phases(&met.gain, PHASE_GRID)?;
                Ok(vec![m.pump_ratio(), cav.dim() as f64, tm, to, tm - to, met.eta_theta(tm), met.eta_theta(to)])
            };
            (k, db, run())
        })
        .collect();
    let mut t = Table::new(&["kerr_over_kappa", "G_ps_dB", "pump_ratio", "dim", "theta_m", "theta_o", "theta_m_minus_theta_o", "eta_theta_m", "eta_theta_o", "status"]);
    t.meta("figure", "fig7ab")
        .meta("kappa", kappa)
        .meta("phases", "theta_m maximizes |G11(theta)|; theta_o is the zero of G12(theta) with the larger |G11|");
    for (k, db, v) in rows {
        let s = status(&v);
        let mut row = vec![Cell::Num(k), Cell::Num(db)];
        row.extend(cells(v, 7));
        row.push(s);
        t.push(row);
    }
    Ok(t)
}

fn boxcar() -> FilterSpec {
    FilterSpec::boxcar(BOXCAR_US).expect("positive duration")
}

fn fig8a(res: Resolution) -> CliResult<Table> {
    let kappa = kappa_50mhz();
    let filter = boxcar();
    let kerrs = [0.0, 1e-3, 3e-3, 1e-2];
    let pumps = match res {
        Resolution::Desk => linspace(0.1, 0.9, 9),
        Resolution::Quick => vec![0.3, 0.6],
    };
    let points: Vec<(f64, f64)> = kerrs.iter().flat_map(|&k| pumps.iter().map(move |&r| (k, r))).collect();
    let rows: Vec<(f64, f64, jpa_core::Result<Vec<f64>>)> = points
        .par_iter()
        .map(|&(k, r)| {
            let run = || -> jpa_core::Result<Vec<f64>> {
                let lam = real_pump(r, kappa);
                let m = if k == 0.0 {
                    JpaModel::dpa(0.0, lam, kappa, 0.0)?
                } else {
                    JpaModel::bi_current(0.0, lam, -k * kappa, kappa, 0.0, 100.0 * kappa)?
                };
                let cav = cavity(&m)?;
                let met = metrology(&cav)?;
                let p = DpaParams::new(0.0, lam, kappa, 0.0)?;
                Ok(vec![
                    cav.dim() as f64,
                    to_db(met.gain_pp),
                    squeezing_db(&cav, &filter)?,
                    dpa_filtered_db(&p, &filter)?,
                    to_db(dpa::narrowband_squeezing(0.0, lam.norm(), kappa)?),
                ])
            };
            (k, r, run())
        })
        .collect();
    let mut t = Table::new(&["kerr_over_kappa", "pump_ratio", "dim", "G_pp_dB", "S_f_dB", "S_f_dpa_oracle_dB", "S_unfiltered_dpa_dB", "status"]);
    t.meta("figure", "fig8a")
        .meta("kappa", kappa)
        .meta("filter", "boxcar 0.256 us")
        .meta("columns", "S_f_dB from time-domain regression; S_f_dpa_oracle_dB is the ideal DPA with the same pump from frequency integrals; kerr_over_kappa = 0 rows are the ideal DPA");
    for (k, r, v) in rows {
        let s = status(&v);
        let mut row = vec![Cell::Num(k), Cell::Num(r)];
        row.extend(cells(v, 5));
        row.push(s);
        t.push(row);
    }
    Ok(t)
}

fn fig8b(res: Resolution) -> CliResult<Table> {
    let kappa = kappa_50mhz();
    let filter = boxcar();
    let pumps = match res {
        Resolution::Desk => linspace(0.1, 0.9, 9),
        Resolution::Quick => vec![0.3, 0.6],
    };
    let mut points = Vec::new();
    for scheme in ["mono", "bi"] {
        for k in [1e-3, 1e-2] {
            for &r in &pumps {
                points.push((scheme, k, r));
            }
        }
    }
    let rows: Vec<(&str, f64, f64, jpa_core::Result<Vec<f64>>)> = points
        .par_iter()
        .map(|&(scheme, k, r)| {
            let run = || -> jpa_core::Result<Vec<f64>> {
                let lam = real_pump(r, kappa);
                let m = if scheme == "mono" {
                    JpaModel::mono_current(0.0, lam, -k * kappa, kappa, 0.0)?
                } else {
                    JpaModel::bi_current(0.0, lam, -k * kappa, kappa, 0.0, 100.0 * kappa)?
                };
                let cav = cavity(&m)?;
                let g_dpa = dpa::phase_preserving_gain(&DpaParams::new(0.0, lam, kappa, 0.0)?, 0.0);
                Ok(vec![cav.dim() as f64, to_db(g_dpa), squeezing_db(&cav, &filter)?])
            };
            (scheme, k, r, run())
        })
        .collect();
    let mut t = Table::new(&["scheme", "kerr_over_kappa", "pump_ratio", "dim", "G_dpa_dB", "S_f_dB", "status"]);
    t.meta("figure", "fig8b").meta("kappa", kappa).meta("filter", "boxcar 0.256 us").meta("gain", "G_dpa_dB is the ideal-DPA gain at the same pump");
    for (scheme, k, r, v) in rows {
        let s = status(&v);
        let mut row = vec![Cell::text(scheme), Cell::Num(k), Cell::Num(r)];
        row.extend(cells(v, 3));
        row.push(s);
        t.push(row);
    }
    Ok(t)
}

/// Flux-pumped model with Λ/2π = −1.55 MHz, κ_tot/2π = 130 MHz, γ = κ/10.
pub fn fig10_params() -> (f64, f64, f64) {
    let kappa_tot = 2.0 * PI * 130.0;
    let kappa = kappa_tot / 1.1;
    (kappa, kappa / 10.0, -2.0 * PI * 1.55)
}

fn fig10(res: Resolution) -> CliResult<Table> {
    let (kappa, gamma, kerr) = fig10_params();
    let filter = boxcar();
    let pumps = match res {
        Resolution::Desk => linspace(0.1, 0.95, 18),
        Resolution::Quick => vec![0.3, 0.7, 0.9],
    };
    let rows: Vec<(f64, jpa_core::Result<Vec<f64>>)> = pumps
        .par_iter()
        .map(|&r| {
            let run = || -> jpa_core::Result<Vec<f64>> {
                let lam = real_pump(r, kappa + gamma);
                let m = JpaModel::flux(0.0, lam, kerr, kappa, gamma)?;
                let cav = cavity(&m)?;
                let met = metrology(&cav)?;
                let p = DpaParams::new(0.0, lam, kappa, gamma)?;
                Ok(vec![
                    cav.dim() as f64,
                    to_db(met.gain_pp),
                    to_db(dpa::phase_preserving_gain(&p, 0.0)),
                    squeezing_db(&cav, &filter)?,
                    dpa_filtered_db(&p, &filter)?,
                ])
            };
            (r, run())
        })
        .collect();
    let mut t = Table::new(&["pump_ratio", "dim", "G_pp_dB", "G_dpa_dB", "S_f_dB", "S_f_dpa_dB", "status"]);
    t.meta("figure", "fig10")
        .meta("kappa", kappa)
        .meta("gamma", gamma)
        .meta("kerr", kerr)
        .meta("model", "flux pump, Lambda/2pi = -1.55 MHz, kappa_tot/2pi = 130 MHz, gamma = kappa/10")
        .meta("filter", "boxcar 0.256 us");
    for (r, v) in rows {
        let s = status(&v);
        let mut row = vec![Cell::Num(r)];
        row.extend(cells(v, 5));
        row.push(s);
        t.push(row);
    }
    Ok(t)
}

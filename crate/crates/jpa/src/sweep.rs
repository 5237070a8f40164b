//! Sweep orchestration. Workers evaluate points independently and return
//! rows; the caller owns all I/O.

use jpa_core::characterization::{best_eta_phase, check_metrology_model, dpa_deviation, induced_displacement_ratio, metrology, optimal_phases};
use jpa_core::convergence::cavity_with_tail;
use jpa_core::cumulant::summary;
use jpa_core::dpa::{self, DpaParams};
use jpa_core::outfield::{to_db, StationaryCavity};
use jpa_core::phase_space::{wigner_on_grid, PhaseSpaceGrid};
use rayon::prelude::*;

use crate::config::{PointParams, SweepConfig};
use crate::error::{error_code, CliError, CliResult};
use crate::table::{Cell, Table};

const PARAM_COLUMNS: &[&str] = &[
    "index", "scheme", "kappa", "gamma", "detuning", "kerr", "kerr_ratio", "pump_ratio", "pump_phase", "pump_re", "pump_im", "delta12",
];
const META_COLUMNS: &[&str] = &["dim", "tail_population", "steady_residual", "ode_steps", "status", "error"];

fn observable_columns(cfg: &SweepConfig) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    let mut add = |names: &[&str]| cols.extend(names.iter().map(|s| s.to_string()));
    if cfg.wants("gain") {
        add(&["G_pp_dB", "G_ps_dB", "G_dpa_dB", "g11", "g12", "g21", "g22"]);
    }
    if cfg.wants("eta_pp") {
        add(&["eta_pp", "eta_pp_limit"]);
    }
    if cfg.wants("eta_theta") {
        add(&["theta_m", "theta_o", "theta_best", "eta_theta_m", "eta_theta_o", "eta_best"]);
    }
    if cfg.wants("xi") {
        add(&["xi", "displacement_ratio"]);
    }
    if cfg.wants("wigner") {
        add(&["wigner_origin", "wigner_min"]);
    }
    if cfg.wants("moments") {
        add(&["D_re", "D_im", "N_f", "M_f_re", "M_f_im", "commutator"]);
    }
    if cfg.wants("squeezing") {
        add(&["S_f", "S_f_dB"]);
    }
    if cfg.wants("cumulants") {
        add(&[
            "cum_d3_re", "cum_d3_im", "cum_dd_d2_re", "cum_dd_d2_im", "cum_d4_re", "cum_d4_im", "cum_dd_d3_re", "cum_dd_d3_im", "cum_dd2_d2",
        ]);
    }
    if cfg.wants("spectrum") {
        for w in &cfg.output.spectrum_omega {
            cols.push(format!("N_out(w={w:?})"));
            cols.push(format!("M_out_re(w={w:?})"));
            cols.push(format!("M_out_im(w={w:?})"));
        }
    }
    cols
}

pub fn columns(cfg: &SweepConfig) -> Vec<String> {
    PARAM_COLUMNS.iter().chain(META_COLUMNS).map(|s| s.to_string()).chain(observable_columns(cfg)).collect()
}

/// Observable values of one group; `Err` leaves the group's cells empty.
type Group = jpa_core::Result<Vec<f64>>;

fn cavity(cfg: &SweepConfig, p: &PointParams) -> jpa_core::Result<StationaryCavity> {
    let model = p.build()?;
    let s = &cfg.solver;
    if s.fixed_dim {
        StationaryCavity::new(&model, s.dim)
    } else {
        cavity_with_tail(&model, s.dim, s.dim_step, s.max_dim, s.tail_tol)
    }
}

fn groups(cfg: &SweepConfig, p: &PointParams, cav: &StationaryCavity, steps: &mut usize) -> Vec<(usize, Group)> {
    let model = p.build().expect("built before");
    let grid_n = cfg.solver.phase_grid;
    let mut out = Vec::new();
    let met = if cfg.wants("gain") || cfg.wants("eta_pp") || cfg.wants("eta_theta") {
        Some(check_metrology_model(&model).and_then(|_| metrology(cav)))
    } else {
        None
    };
    if cfg.wants("gain") {
        let g = met.clone().expect("requested").map(|m| {
            let dpa_gain = DpaParams::new(p.detuning, p.pump(), p.kappa, p.gamma).map(|d| to_db(dpa::phase_preserving_gain(&d, 0.0))).unwrap_or(f64::NAN);
            let amp = m.gain.phase_sensitive_amplitude();
            vec![to_db(m.gain_pp), to_db(amp * amp), dpa_gain, m.gain.g(1, 1), m.gain.g(1, 2), m.gain.g(2, 1), m.gain.g(2, 2)]
        });
        out.push((7, g));
    }
    if cfg.wants("eta_pp") {
        out.push((2, met.clone().expect("requested").map(|m| vec![m.eta_pp, m.gain_pp / (2.0 * m.gain_pp - 1.0)])));
    }
    if cfg.wants("eta_theta") {
        let g = met.clone().expect("requested").and_then(|m| {
            let (tm, to) = optimal_phases(&m.gain, grid_n)?;
            let tb = best_eta_phase(&m.noise.sigma_a, grid_n);
            Ok(vec![tm, to, tb, m.eta_theta(tm), m.eta_theta(to), m.eta_theta(tb)])
        });
        out.push((6, g));
    }
    if cfg.wants("xi") {
        out.push((2, Ok(vec![dpa_deviation(cav.rho()), induced_displacement_ratio(&model, cav.rho())])));
    }
    if cfg.wants("wigner") {
        let h = cfg.output.wigner_half_width;
        let g = PhaseSpaceGrid::square(h, cfg.output.wigner_points).map(|grid| {
            let w = wigner_on_grid(cav.rho(), &grid);
            let min = w.values.iter().copied().fold(f64::INFINITY, f64::min);
            vec![jpa_core::phase_space::wigner(cav.rho())(0.0, 0.0), min]
        });
        out.push((2, g));
    }
    let want_moments = cfg.wants("moments") || cfg.wants("squeezing") || cfg.wants("cumulants");
    if want_moments {
        let order = if cfg.wants("cumulants") { 4 } else { 2 };
        let ms = cfg.filter().map_err(|e| match e {
            CliError::Core(c) => c,
            other => jpa_core::Error::InvalidParameter(other.to_string()),
        });
        let ms = ms.and_then(|f| cav.filtered_moments(&f, order, cfg.tolerances()));
        if let Ok(m) = &ms {
            *steps = m.steps;
        }
        if cfg.wants("moments") {
            out.push((
                6,
                ms.clone().and_then(|m| {
                    let d = m.mean()?;
                    let mm = m.centered_m()?;
                    Ok(vec![d.re, d.im, m.centered_n()?, mm.re, mm.im, m.commutator])
                }),
            ));
        }
        if cfg.wants("squeezing") {
            out.push((2, ms.clone().and_then(|m| m.squeezing_level()).map(|s| vec![s, to_db(s)])));
        }
        if cfg.wants("cumulants") {
            out.push((
                9,
                ms.and_then(|m| summary(&m)).map(|s| {
                    vec![s.d3.re, s.d3.im, s.dd_d2.re, s.dd_d2.im, s.d4.re, s.d4.im, s.dd_d3.re, s.dd_d3.im, s.dd2_d2]
                }),
            ));
        }
    }
    if cfg.wants("spectrum") {
        let omegas = &cfg.output.spectrum_omega;
        let g = omegas
            .iter()
            .map(|&w| cav.output_spectra(w).map(|(n, m)| [n, m.re, m.im]))
            .collect::<jpa_core::Result<Vec<_>>>()
            .map(|v| v.concat());
        out.push((3 * omegas.len(), g));
    }
    out
}

fn param_cells(index: usize, p: &PointParams) -> Vec<Cell> {
    let lam = p.pump();
    vec![
        Cell::from(index),
        Cell::text(p.scheme.name()),
        p.kappa.into(),
        p.gamma.into(),
        p.detuning.into(),
        p.kerr.into(),
        (p.kerr / p.kappa).into(),
        p.pump_ratio.into(),
        p.pump_phase.into(),
        lam.re.into(),
        lam.im.into(),
        p.delta12.into(),
    ]
}

/// One result row; solver failures become an error code in the row.
pub fn evaluate_point(cfg: &SweepConfig, index: usize, p: &PointParams) -> (Vec<Cell>, bool) {
    let n_obs = observable_columns(cfg).len();
    let mut row = param_cells(index, p);
    let cav = match cavity(cfg, p) {
        Ok(c) => c,
        Err(e) => {
            row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, Cell::text(error_code(&e)), Cell::text(e.to_string())]);
            row.extend(std::iter::repeat_n(Cell::Empty, n_obs));
            return (row, false);
        }
    };
    let mut steps = 0;
    let gs = groups(cfg, p, &cav, &mut steps);
    let first_err = gs.iter().find_map(|(_, g)| g.as_ref().err().cloned());
    row.extend([
        Cell::from(cav.dim()),
        cav.rho().top_population().into(),
        cav.steady.residual.into(),
        Cell::from(steps),
        Cell::text(first_err.as_ref().map_or("ok", error_code)),
        first_err.as_ref().map_or(Cell::Empty, |e| Cell::text(e.to_string())),
    ]);
    for (width, g) in gs {
        match g {
            Ok(v) => row.extend(v.into_iter().map(Cell::Num)),
            Err(_) => row.extend(std::iter::repeat_n(Cell::Empty, width)),
        }
    }
    (row, first_err.is_none())
}

pub struct SweepOutcome {
    pub table: Table,
    pub failed: usize,
}

/// Evaluates all points on a pool of `jobs` threads, rows in point order.
pub fn run_sweep(cfg: &SweepConfig, jobs: Option<usize>) -> CliResult<SweepOutcome> {
    let points = cfg.points()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let rows: Vec<(Vec<Cell>, bool)> = pool.install(|| points.par_iter().enumerate().map(|(k, p)| evaluate_point(cfg, k, p)).collect());
    let cols = columns(cfg);
    let mut table = Table::new(&cols.iter().map(String::as_str).collect::<Vec<_>>());
    table.meta("command", "sweep");
    table.meta("config", serde_json::to_string(cfg)?);
    let mut failed = 0;
    for (row, ok) in rows {
        failed += usize::from(!ok);
        table.push(row);
    }
    Ok(SweepOutcome { table, failed })
}

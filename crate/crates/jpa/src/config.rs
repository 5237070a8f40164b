//! Sweep configuration: TOML with `[model]`, `[[sweep.axis]]`, `[solver]`
//! and `[output]` tables of plain key-value pairs.
//!
//! Rates are angular frequencies in rad/μs, times in μs. The pump is given
//! relative to the linear threshold, λ = pump_ratio · λ_crit · e^{i pump_phase}.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use jpa_core::filter::FilterSpec;
use jpa_core::models::{parametric_threshold, JpaModel, Scheme};
use jpa_core::ode::Tolerances;
use jpa_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::table::Format;

pub const MAX_AXES: usize = 2;

/// Fields that a sweep axis may vary.
pub const AXIS_FIELDS: &[&str] = &["pump_ratio", "pump_phase", "kerr", "kerr_ratio", "detuning", "gamma", "kappa", "delta12"];

pub const OBSERVABLES: &[&str] = &["gain", "eta_pp", "eta_theta", "xi", "wigner", "moments", "cumulants", "squeezing", "spectrum"];

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub scheme: String,
    pub kappa: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub detuning: f64,
    /// Λ in rad/μs; alternatively `kerr_ratio` = Λ/κ.
    pub kerr: Option<f64>,
    pub kerr_ratio: Option<f64>,
    pub pump_ratio: f64,
    #[serde(default)]
    pub pump_phase: f64,
    /// Pump separation of the bichromatic scheme; defaults to 100 κ.
    pub delta12: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub axis: Vec<Axis>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub field: String,
    pub values: Option<Vec<f64>>,
    /// [start, stop, n]
    pub linspace: Option<[f64; 3]>,
    /// [log10 start, log10 stop, n]
    pub logspace: Option<[f64; 3]>,
    /// Multiplies every generated value, e.g. −1 for a negative Kerr axis.
    pub scale: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    /// Starting (or, with `fixed_dim`, the only) Fock dimension.
    pub dim: usize,
    pub dim_step: usize,
    pub max_dim: usize,
    /// Largest accepted population of the highest Fock level.
    pub tail_tol: f64,
    pub fixed_dim: bool,
    pub ode_abs: f64,
    pub ode_rel: f64,
    /// "boxcar" or "gaussian".
    pub filter: String,
    /// Boxcar length in μs.
    pub filter_duration: f64,
    /// Gaussian noise-equivalent bandwidth in MHz.
    pub filter_bandwidth: f64,
    /// Grid points per half turn for phase searches.
    pub phase_grid: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            dim: 16,
            dim_step: 16,
            max_dim: 160,
            tail_tol: 1e-12,
            fixed_dim: false,
            ode_abs: 1e-10,
            ode_rel: 1e-8,
            filter: "boxcar".into(),
            filter_duration: 0.256,
            filter_bandwidth: 4.0,
            phase_grid: 720,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub observables: Vec<String>,
    pub path: PathBuf,
    pub format: Option<Format>,
    /// Angular frequencies for the output spectra.
    #[serde(default = "default_omegas")]
    pub spectrum_omega: Vec<f64>,
    #[serde(default = "default_wigner_half_width")]
    pub wigner_half_width: f64,
    #[serde(default = "default_wigner_points")]
    pub wigner_points: usize,
}

fn default_omegas() -> Vec<f64> {
    vec![0.0]
}

fn default_wigner_half_width() -> f64 {
    5.0
}

fn default_wigner_points() -> usize {
    81
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub solver: SolverSection,
    pub output: OutputSection,
}

/// Model parameters at one sweep point, before building a `JpaModel`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointParams {
    pub scheme: Scheme,
    pub kappa: f64,
    pub gamma: f64,
    pub detuning: f64,
    pub kerr: f64,
    pub pump_ratio: f64,
    pub pump_phase: f64,
    pub delta12: f64,
}

impl PointParams {
    pub fn pump(&self) -> Complex64 {
        Complex64::from_polar(self.pump_ratio * parametric_threshold(self.detuning, self.kappa + self.gamma), self.pump_phase)
    }

    pub fn build(&self) -> jpa_core::Result<JpaModel> {
        let lam = self.pump();
        match self.scheme {
            Scheme::Dpa => JpaModel::dpa(self.detuning, lam, self.kappa, self.gamma),
            Scheme::MonoCurrent => JpaModel::mono_current(self.detuning, lam, self.kerr, self.kappa, self.gamma),
            Scheme::BiCurrent => JpaModel::bi_current(self.detuning, lam, self.kerr, self.kappa, self.gamma, self.delta12),
            Scheme::Flux => JpaModel::flux(self.detuning, lam, self.kerr, self.kappa, self.gamma),
        }
    }

    fn set(&mut self, field: &str, v: f64) {
        match field {
            "pump_ratio" => self.pump_ratio = v,
            "pump_phase" => self.pump_phase = v,
            "kerr" => self.kerr = v,
            "kerr_ratio" => self.kerr = v * self.kappa,
            "detuning" => self.detuning = v,
            "gamma" => self.gamma = v,
            "kappa" => self.kappa = v,
            "delta12" => self.delta12 = v,
            _ => unreachable!("axis fields are validated on load"),
        }
    }
}

impl Axis {
    pub fn points(&self) -> CliResult<Vec<f64>> {
        let given = [self.values.is_some(), self.linspace.is_some(), self.logspace.is_some()];
        if given.iter().filter(|&&b| b).count() != 1 {
            return Err(CliError::Config(format!("axis '{}' needs exactly one of values, linspace, logspace", self.field)));
        }
        let count = |n: f64| -> CliResult<usize> {
            if n >= 1.0 && n.fract() == 0.0 {
                Ok(n as usize)
            } else {
                Err(CliError::Config(format!("axis '{}': point count must be a positive integer", self.field)))
            }
        };
        let raw = if let Some(v) = &self.values {
            v.clone()
        } else if let Some([a, b, n]) = self.linspace {
            let n = count(n)?;
            (0..n).map(|k| if n == 1 { a } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect()
        } else {
            let [a, b, n] = self.logspace.expect("checked above");
            let n = count(n)?;
            (0..n).map(|k| 10f64.powf(if n == 1 { a } else { a + (b - a) * k as f64 / (n - 1) as f64 })).collect()
        };
        if raw.is_empty() {
            return Err(CliError::Config(format!("axis '{}' has no values", self.field)));
        }
        let s = self.scale.unwrap_or(1.0);
        Ok(raw.into_iter().map(|x| x * s).collect())
    }
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: SweepConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> CliResult<()> {
        let m = &self.model;
        Scheme::parse(&m.scheme)?;
        if m.kerr.is_some() && m.kerr_ratio.is_some() {
            return Err(CliError::Config("give kerr or kerr_ratio, not both".into()));
        }
        if self.sweep.axis.len() > MAX_AXES {
            return Err(CliError::Config(format!("at most {MAX_AXES} sweep axes")));
        }
        for (k, a) in self.sweep.axis.iter().enumerate() {
            if !AXIS_FIELDS.contains(&a.field.as_str()) {
                return Err(CliError::Config(format!("unknown axis field '{}' (expected one of {AXIS_FIELDS:?})", a.field)));
            }
            if self.sweep.axis[..k].iter().any(|b| b.field == a.field) {
                return Err(CliError::Config(format!("axis '{}' given twice", a.field)));
            }
            a.points()?;
        }
        for o in &self.output.observables {
            if !OBSERVABLES.contains(&o.as_str()) {
                return Err(CliError::Config(format!("unknown observable '{o}' (expected one of {OBSERVABLES:?})")));
            }
        }
        let s = &self.solver;
        if s.dim < 2 || s.max_dim < s.dim || s.dim_step == 0 {
            return Err(CliError::Config("solver needs 2 <= dim <= max_dim and dim_step > 0".into()));
        }
        if s.phase_grid < 360 {
            return Err(CliError::Config("phase_grid must be at least 360".into()));
        }
        if self.output.wigner_points < 2 {
            return Err(CliError::Config("wigner_points must be at least 2".into()));
        }
        self.filter()?;
        Ok(())
    }

    pub fn wants(&self, observable: &str) -> bool {
        self.output.observables.iter().any(|o| o == observable)
    }

    pub fn format(&self) -> Format {
        self.output.format.unwrap_or_else(|| Format::from_path(&self.output.path))
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances { abs: self.solver.ode_abs, rel: self.solver.ode_rel }
    }

    pub fn filter(&self) -> CliResult<FilterSpec> {
        let s = &self.solver;
        Ok(match s.filter.as_str() {
            "boxcar" => FilterSpec::boxcar(s.filter_duration)?,
            // MHz to 1/μs is the identity
            "gaussian" => FilterSpec::gaussian(s.filter_bandwidth)?,
            other => return Err(CliError::Config(format!("unknown filter '{other}'"))),
        })
    }

    pub fn template(&self) -> PointParams {
        let m = &self.model;
        PointParams {
            scheme: Scheme::parse(&m.scheme).expect("validated"),
            kappa: m.kappa,
            gamma: m.gamma,
            detuning: m.detuning,
            kerr: m.kerr.or(m.kerr_ratio.map(|r| r * m.kappa)).unwrap_or(0.0),
            pump_ratio: m.pump_ratio,
            pump_phase: m.pump_phase,
            delta12: m.delta12.unwrap_or(100.0 * m.kappa),
        }
    }

    /// Sweep points in row order: the first axis varies slowest. `kappa` is
    /// applied before `kerr_ratio` so the ratio refers to the swept κ.
    pub fn points(&self) -> CliResult<Vec<PointParams>> {
        let axes: Vec<(&str, Vec<f64>)> = self.sweep.axis.iter().map(|a| Ok((a.field.as_str(), a.points()?))).collect::<CliResult<_>>()?;
        let mut combos: Vec<Vec<(&str, f64)>> = vec![Vec::new()];
        for (field, vals) in &axes {
            combos = combos.into_iter().flat_map(|c| vals.iter().map(move |&v| [c.clone(), vec![(*field, v)]].concat())).collect();
        }
        let ratio_in_model = self.model.kerr_ratio;
        Ok(combos
            .into_iter()
            .map(|assign| {
                let mut p = self.template();
                let mut order = assign.clone();
                order.sort_by_key(|(f, _)| *f != "kappa");
                for (f, v) in &order {
                    p.set(f, *v);
                }
                // keep Λ/κ fixed when only κ is swept and the model gave a ratio
                if let Some(r) = ratio_in_model {
                    if !assign.iter().any(|(f, _)| *f == "kerr" || *f == "kerr_ratio") {
                        p.kerr = r * p.kappa;
                    }
                }
                if self.model.delta12.is_none() && !assign.iter().any(|(f, _)| *f == "delta12") {
                    p.delta12 = 100.0 * p.kappa;
                }
                p
            })
            .collect())
    }
}

/// κ/2π = 50 MHz in rad/μs.
pub fn kappa_50mhz() -> f64 {
    2.0 * PI * 50.0
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jpa::check::run_checks;
use jpa::config::SweepConfig;
use jpa::figures::{generate, Figure, Resolution, FIGURES};
use jpa::histfile;
use jpa::sweep::run_sweep;
use jpa::synth::synthesize_parallel;
use jpa::table::{Cell, Format};
use jpa::{CliError, CliResult};
use jpa_core::recon::{bootstrap_reconstruct, db_to_linear, gain_calibration_band, GaussianSignal, HistogramGrid, SynthSpec, ThermalNoise};
use jpa_core::Complex64;

/// Josephson parametric amplifier simulations.
#[derive(Parser)]
#[command(name = "jpa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep described by a TOML file.
    Sweep {
        config: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Override the output path from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the data behind one figure.
    Figure {
        /// One of fig2a, fig2b, fig4, fig5, fig6, fig7ab, fig8a, fig8b, fig10.
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// A few points per curve instead of the desk grid.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Synthesize or invert homodyne histograms.
    #[command(subcommand)]
    Recon(Recon),
    /// Compare a few solver outputs with closed forms.
    Check,
}

#[derive(Subcommand)]
enum Recon {
    /// Sample a Gaussian signal through a noisy amplifier chain.
    Synth(SynthArgs),
    /// Reconstruct signal moments from a pump-on/pump-off pair.
    Solve(SolveArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 20.0)]
    gain_db: f64,
    /// Thermal occupancy of the chain noise mode.
    #[arg(long, default_value_t = 10.0)]
    noise: f64,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Centered ⟨a†a⟩ of the signal.
    #[arg(long = "signal-n", default_value_t = 0.0)]
    signal_n: f64,
    #[arg(long = "signal-m-re", default_value_t = 0.0)]
    signal_m_re: f64,
    #[arg(long = "signal-m-im", default_value_t = 0.0)]
    signal_m_im: f64,
    #[arg(long = "mean-re", default_value_t = 0.0)]
    mean_re: f64,
    #[arg(long = "mean-im", default_value_t = 0.0)]
    mean_im: f64,
    /// Bins per axis.
    #[arg(long, default_value_t = 128)]
    bins: usize,
    #[arg(long)]
    out_on: PathBuf,
    #[arg(long)]
    out_off: PathBuf,
    /// Also write the pump-on histogram as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    on: PathBuf,
    #[arg(long)]
    off: PathBuf,
    /// Chain gain in dB; defaults to the value stored in the histogram.
    #[arg(long)]
    gain_db: Option<f64>,
    #[arg(long, default_value_t = 4)]
    order: usize,
    #[arg(long, default_value_t = 200)]
    resamples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Half-width of the gain calibration band in dB.
    #[arg(long)]
    band_db: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit status: 0 success, 2 some points failed, 1 fatal error.
enum Outcome {
    Ok,
    Partial,
}

fn pool(jobs: Option<usize>) -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j.max(1));
    }
    b.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn sweep(config: PathBuf, jobs: Option<usize>, out: Option<PathBuf>) -> CliResult<Outcome> {
    let cfg = SweepConfig::load(&config)?;
    let path = out.unwrap_or_else(|| cfg.output.path.clone());
    let format = cfg.output.format.unwrap_or_else(|| Format::from_path(&path));
    let res = run_sweep(&cfg, jobs)?;
    res.table.write(&path, format)?;
    eprintln!("{} points, {} failed, written to {}", res.table.rows.len(), res.failed, path.display());
    Ok(if res.failed > 0 { Outcome::Partial } else { Outcome::Ok })
}

fn figure(name: &str, out: Option<PathBuf>, quick: bool, jobs: Option<usize>) -> CliResult<Outcome> {
    let fig: Figure = name.parse()?;
    let res = if quick { Resolution::Quick } else { Resolution::Desk };
    let table = pool(jobs)?.install(|| generate(fig, res))?;
    let ok = Cell::text("ok");
    let failed = table.column("status").map_or(0, |k| table.rows.iter().filter(|r| r[k] != ok).count());
    let path = out.unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
    table.write(&path, Format::from_path(&path))?;
    eprintln!("{} rows, {failed} failed, written to {}", table.rows.len(), path.display());
    Ok(if failed > 0 { Outcome::Partial } else { Outcome::Ok })
}

fn synth(a: SynthArgs) -> CliResult<Outcome> {
    let sig = GaussianSignal::new(Complex64::new(a.mean_re, a.mean_im), a.signal_n, Complex64::new(a.signal_m_re, a.signal_m_im))?;
    let spec = SynthSpec::new(a.gain_db, ThermalNoise::new(a.noise)?, a.samples, a.seed)?;
    let grid = HistogramGrid::covering(&sig, &spec.noise, spec.gain_chain, a.bins, 8.0)?;
    let (on, off) = synthesize_parallel(&sig, &spec, &grid)?;
    histfile::write(&a.out_on, &on)?;
    histfile::write(&a.out_off, &off)?;
    if let Some(p) = a.csv {
        histfile::to_table(&on).write(&p, Format::Csv)?;
    }
    eprintln!("{} samples per histogram, {} on / {} off outside the grid", a.samples, on.outside, off.outside);
    Ok(Outcome::Ok)
}

fn solve(a: SolveArgs) -> CliResult<Outcome> {
    let on = histfile::read(&a.on)?;
    let off = histfile::read(&a.off)?;
    let gain_db = a.gain_db.unwrap_or_else(|| 10.0 * on.gain_chain.log10());
    let rm = bootstrap_reconstruct(&on, &off, db_to_linear(gain_db), a.order, a.resamples, a.seed)?;
    let band = a.band_db.map(|d| gain_calibration_band(&on, &off, gain_db, d)).transpose()?;
    let text = histfile::reconstruction_json(&rm, band)?;
    match a.out {
        Some(p) => std::fs::write(&p, text).map_err(|e| CliError::io(&p, e))?,
        None => print!("{text}"),
    }
    Ok(if rm.flagged.is_empty() { Outcome::Ok } else { Outcome::Partial })
}

fn check() -> CliResult<Outcome> {
    let results = run_checks();
    for r in &results {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    Ok(if results.iter().all(|r| r.passed) { Outcome::Ok } else { Outcome::Partial })
}

fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::Sweep { config, jobs, out } => sweep(config, jobs, out),
        Command::Figure { name, out, quick, jobs } => figure(&name, out, quick, jobs),
        Command::Recon(Recon::Synth(a)) => synth(a),
        Command::Recon(Recon::Solve(a)) => solve(a),
        Command::Check => check(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::UnknownFigure(_) = e {
                eprintln!("known figures: {}", FIGURES.join(", "));
            }
            ExitCode::from(1)
        }
    }
}

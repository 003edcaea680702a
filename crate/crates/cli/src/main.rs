//! `cgi-sim`: phase-shift simulation and gravity-gradient estimation for
//! co-located atom interferometers.
//!
//! Exit codes: 0 success, 2 configuration error, 3 region-of-validity or
//! singularity error.

// validations use `!(x > 0.0)` so NaN fails them too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cgi_core::interferometer::GeometryKind;
use config::{PotentialKind, RunConfig, SweepRange};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(cgi_core::Error),
}

impl CliError {
    fn config(msg: String) -> Self {
        CliError::Config(msg)
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_domain_exit() => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(cgi_core::Error::Io(e))
    }
}

impl From<std::fmt::Error> for CliError {
    fn from(e: std::fmt::Error) -> Self {
        CliError::Config(format!("formatting failed: {e}"))
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "cgi-sim",
    version,
    about = "Co-located gradiometric atom interferometer simulation",
    after_help = "Environment: CGI_SIM_THREADS caps sweep parallelism."
)]
struct Cli {
    /// INI configuration file with sections constants, atom, laser, run, potential.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override the momentum-quantum multiplier N.
    #[arg(long = "N", global = true, value_name = "N")]
    n: Option<u32>,

    /// Override the effective wave number k in 1/m.
    #[arg(long, global = true, value_name = "K")]
    k: Option<f64>,

    /// T_R sweep range START:STOP:STEP in seconds (sweep-tr).
    #[arg(long, global = true, value_name = "RANGE")]
    tr: Option<String>,

    /// z0 sweep range START:STOP:STEP in metres (sweep-z0; evaluation grid for estimate).
    #[arg(long, global = true, value_name = "RANGE")]
    z0: Option<String>,

    /// Estimator baseline delta_h in metres.
    #[arg(long = "delta-h", global = true, value_name = "M")]
    delta_h: Option<f64>,

    /// Potential selection override: ideal | poly | csv | synth.
    #[arg(long, global = true, value_name = "KIND")]
    potential: Option<String>,

    /// Write CSV to a file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one geometry and print its phase breakdown.
    Simulate {
        /// mzi or sddi.
        #[arg(long, default_value = "mzi")]
        geometry: String,
    },
    /// Run the co-located pair and print totals plus the differential.
    Cgi,
    /// Differential phase versus interferometer time, with a quartic fit.
    SweepTr,
    /// Differential phase versus initial height.
    SweepZ0,
    /// Gravity-gradient profile estimate over the evaluation grid.
    Estimate,
    /// The ten-row closed-form phase catalogue.
    Table1,
    /// Optimal last-pulse detuning cancelling the time-dependent FSL phase.
    FslDetuning,
    /// Emit the synthetic profile's g(z) and Gamma(z).
    SynthProfile,
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.n {
        cfg.laser.n = n;
    }
    if let Some(k) = cli.k {
        cfg.laser.k = k;
    }
    if let Some(kind) = &cli.potential {
        cfg.potential.kind = Some(PotentialKind::parse(kind)?);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var("CGI_SIM_THREADS") {
        let n: usize = value
            .parse()
            .map_err(|_| CliError::config(format!("bad CGI_SIM_THREADS value `{value}`")))?;
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| CliError::config(format!("cannot build thread pool: {e}")))
}

fn dispatch(cli: &Cli) -> Result<String, CliError> {
    let cfg = load_config(cli)?;
    let pool = thread_pool()?;
    let tr_range = cli.tr.as_deref().map(SweepRange::parse).transpose()?;
    let z0_range = cli.z0.as_deref().map(SweepRange::parse).transpose()?;

    match &cli.command {
        Command::Simulate { geometry } => {
            let kind = match geometry.as_str() {
                "mzi" => GeometryKind::Mzi,
                "sddi" => GeometryKind::Sddi,
                other => {
                    return Err(CliError::config(format!(
                        "unknown geometry `{other}` (expected mzi|sddi)"
                    )))
                }
            };
            commands::simulate(&cfg, kind)
        }
        Command::Cgi => commands::cgi(&cfg),
        Command::SweepTr => {
            let range = tr_range
                .ok_or_else(|| CliError::config("sweep-tr needs --tr START:STOP:STEP".into()))?;
            pool.install(|| commands::sweep_tr(&cfg, &range))
        }
        Command::SweepZ0 => {
            let range = z0_range
                .ok_or_else(|| CliError::config("sweep-z0 needs --z0 START:STOP:STEP".into()))?;
            pool.install(|| commands::sweep_z0(&cfg, &range))
        }
        Command::Estimate => {
            let delta_h = cli.delta_h.unwrap_or(1.0);
            pool.install(|| commands::estimate(&cfg, delta_h, z0_range.as_ref()))
        }
        Command::Table1 => commands::table1(&cfg),
        Command::FslDetuning => commands::fsl_detuning(&cfg),
        Command::SynthProfile => commands::synth_profile(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = dispatch(&cli).and_then(|csv| match &cli.out {
        Some(path) => std::fs::write(path, csv).map_err(CliError::from),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(csv.as_bytes()).map_err(CliError::from)
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

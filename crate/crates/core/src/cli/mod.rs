//! Command-line front end.

pub mod config;
pub mod output;
pub mod presets;
pub mod verify;

use std::ffi::OsString;
use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::atoms::Scenario;
use crate::beams::PhaseForm;
use crate::error::{Error, Result};
use crate::profiles::{self, GridScan, RabiMotion, Scene};

use config::{Command, Format, RawConfig, RunConfig, TimeList};

/// Environment variable holding the worker count.
pub const THREADS_ENV: &str = "TWISTBEAM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "twistbeam", version, about = "Bessel beams of laser-driven two-level atoms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum CliCommand {
    /// Density along ξ at fixed φ.
    Radial,
    /// Density along φ ∈ [0, 2π) at fixed ξ.
    Azimuthal,
    /// Density on a square grid in the transverse plane.
    Grid,
    /// Interference term Δ along ξ.
    Delta,
    /// Upper/lower populations of a single plane-wave atom.
    Rabi,
    /// Run the oracle suite and write a pass/fail report.
    Verify,
}

impl From<CliCommand> for Command {
    fn from(c: CliCommand) -> Self {
        match c {
            CliCommand::Radial => Command::Radial,
            CliCommand::Azimuthal => Command::Azimuthal,
            CliCommand::Grid => Command::Grid,
            CliCommand::Delta => Command::Delta,
            CliCommand::Rabi => Command::Rabi,
            CliCommand::Verify => Command::Verify,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Named parameter pack: fig2, fig3-{H,Li,Na,K}, fig4-*, fig5-*.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// TOML file with the same keys as the long flags (snake_case).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Built-in species (H, Li, Na, K or their names) or a species file.
    #[arg(long, global = true)]
    pub species: Option<String>,
    /// Transverse speed p⊥0/m, e.g. 1.4e6cm/s or 6.4e-3au.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub velocity: Option<String>,
    /// p⊥0/p₀ [default: 0.2].
    #[arg(long, global = true)]
    pub cone_ratio: Option<f64>,
    /// OAM quantum number ℓ [default: 2].
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub ell: Option<i32>,
    /// Field amplitude, e.g. 4GV/cm or 0.78au.
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// Laser propagation angle, e.g. 0.5pi, 90deg, 1.57rad [default: 0.5pi].
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub phi_laser: Option<String>,
    /// collinear or crossed [default: crossed; collinear for rabi].
    #[arg(long, global = true)]
    pub scenario: Option<Scenario>,
    /// Dipole component (x or z); must match the scenario.
    #[arg(long, global = true)]
    pub polarization: Option<String>,
    /// approx or exact laser phase in the mode coordinates [default: approx].
    #[arg(long, global = true)]
    pub phase_form: Option<PhaseForm>,
    /// Comma-separated times, e.g. 10fs,15fs,20fs.
    #[arg(long, global = true)]
    pub time: Option<String>,
    /// Azimuth of radial and delta scans (and rabi plane wave) [default: 1/3pi].
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub phi: Option<String>,
    /// ξ of the azimuthal scan [default: 3].
    #[arg(long, global = true)]
    pub xi: Option<f64>,
    /// Start of the ξ range [default: 0].
    #[arg(long, global = true)]
    pub xi_min: Option<f64>,
    /// End of the ξ range [default: 15].
    #[arg(long, global = true)]
    pub xi_max: Option<f64>,
    /// Half-width of the grid in ξ units [default: 15].
    #[arg(long, global = true)]
    pub extent: Option<f64>,
    /// Samples per scan, per axis for grid [default: 512; grid 81].
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Length of the rabi trace, e.g. 50fs [default: two Rabi periods].
    #[arg(long, global = true)]
    pub duration: Option<String>,
    /// Rabi trace for an atom at rest.
    #[arg(long, global = true)]
    pub rest: bool,
    /// ODE tolerance of the verify suite [default: 1e-8].
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output format [default: csv].
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Output file; several times give <stem>_t<i>.<ext>. Default: stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Options {
    fn raw(&self) -> RawConfig {
        RawConfig {
            preset: self.preset.clone(),
            species: self.species.clone(),
            velocity: self.velocity.clone(),
            cone_ratio: self.cone_ratio,
            ell: self.ell,
            field: self.field.clone(),
            phi_laser: self.phi_laser.clone(),
            scenario: self.scenario,
            polarization: self.polarization.clone(),
            phase_form: self.phase_form,
            time: self.time.clone().map(TimeList::Joined),
            phi: self.phi.clone(),
            xi: self.xi,
            xi_min: self.xi_min,
            xi_max: self.xi_max,
            extent: self.extent,
            samples: self.samples,
            duration: self.duration.clone(),
            rest: self.rest.then_some(true),
            tol: self.tol,
            format: self.format,
            out: self.out.clone(),
        }
    }
}

/// Parses flags and the optional config file into a validated run.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Config(e.to_string()))?;
    resolve(&cli)
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let file = cli.options.config.as_deref().map(RawConfig::from_file).transpose()?;
    RunConfig::resolve(cli.command.into(), cli.options.raw(), file)
}

fn scene(config: &RunConfig) -> Result<Scene> {
    let cone = config
        .cone()?
        .ok_or_else(|| Error::Config("--velocity is required".into()))?;
    Ok(Scene {
        cone,
        species: config.species.clone(),
        laser: config.laser()?,
        form: config.phase_form,
    })
}

/// Times of the rabi trace: `samples` points over `[0, duration]`.
fn rabi_times(config: &RunConfig) -> Result<Vec<f64>> {
    let duration = match &config.duration {
        Some(d) => d.au,
        None => {
            let laser = config.laser()?;
            let (rabi, _) = crate::beams::coupling(&config.species, &laser);
            if rabi == 0.0 {
                return Err(Error::Config("--duration is required when the Rabi frequency is zero".into()));
            }
            4.0 * PI / rabi
        }
    };
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::Config(format!("--duration must be positive, got {duration}")));
    }
    Ok(profiles::linspace(0.0, duration, config.samples))
}

/// Computes the scans of a non-verify command.
pub fn scans(config: &RunConfig) -> Result<Vec<GridScan>> {
    let times: Vec<f64> = config.times.iter().map(|t| t.au).collect();
    let each = |f: &dyn Fn(&Scene, f64) -> Result<GridScan>| -> Result<Vec<GridScan>> {
        let scene = scene(config)?;
        times.iter().map(|&t| f(&scene, t)).collect()
    };
    let n = config.samples;
    match config.command {
        Command::Radial => each(&|s, t| profiles::radial_scan(s, config.phi.au, t, config.xi_range, n)),
        Command::Azimuthal => each(&|s, t| profiles::azimuthal_scan(s, config.xi, t, n)),
        Command::Grid => each(&|s, t| profiles::grid_snapshot(s, t, config.extent, n, n)),
        Command::Delta => each(&|s, t| profiles::delta_scan(s, config.phi.au, t, config.xi_range, n)),
        Command::Rabi => {
            let laser = config.laser()?;
            let cone = config.cone()?;
            let motion = match (&cone, config.rest) {
                (_, true) => RabiMotion::Rest,
                (Some(cone), false) => RabiMotion::Moving {
                    cone,
                    phi: config.phi.au,
                },
                (None, false) => return Err(Error::Config("--velocity is required unless --rest is given".into())),
            };
            let times = rabi_times(config)?;
            Ok(vec![profiles::rabi_scan(&config.species, &laser, &times, motion)?])
        }
        Command::Verify => Err(Error::Config("verify produces a report, not scans".into())),
    }
}

/// Executes a resolved run; returns the process exit status.
pub fn run(config: &RunConfig) -> Result<i32> {
    let echo = config.echo();
    if config.command == Command::Verify {
        let checks = verify::run(config.tol)?;
        output::emit_report(&checks, &echo, config.format, config.out.as_deref())?;
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect();
        if failed.is_empty() {
            return Ok(0);
        }
        eprintln!("verify: {} check(s) failed: {}", failed.len(), failed.join(", "));
        return Ok(1);
    }
    let scans = scans(config)?;
    for path in output::emit(&scans, &echo, config.format, config.out.as_deref())? {
        log::info!("wrote {}", path.display());
    }
    Ok(0)
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got '{value}'")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Entry point behind the binary: parses, runs and maps errors to exit
/// codes (2 config, 3 physics, 4 I/O, 1 failed verify).
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = configure_threads().and_then(|_| resolve(&cli)).and_then(|c| run(&c));
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

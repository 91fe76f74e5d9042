//! Run configuration: raw values from presets, files and flags, merged and
//! resolved into atomic units before any computation starts.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::atoms::{self, LaserField, Polarization, Scenario, Species};
use crate::beams::{BeamCone, PhaseForm, MAX_BETA};
use crate::error::{Error, Result};
use crate::units::{self, Unit, SPEED_OF_LIGHT};

use super::presets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Radial,
    Azimuthal,
    Grid,
    Delta,
    Rabi,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Radial => "radial",
            Command::Azimuthal => "azimuthal",
            Command::Grid => "grid",
            Command::Delta => "delta",
            Command::Rabi => "rabi",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A list of tagged times, written either as one comma-separated string or
/// as an array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeList {
    Joined(String),
    Items(Vec<String>),
}

impl TimeList {
    fn items(&self) -> Vec<String> {
        match self {
            TimeList::Joined(s) => s.split(',').map(|p| p.trim().to_string()).collect(),
            TimeList::Items(v) => v.clone(),
        }
    }
}

/// Unresolved settings. Every field is optional so that presets, config
/// files and flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub preset: Option<String>,
    pub species: Option<String>,
    pub velocity: Option<String>,
    pub cone_ratio: Option<f64>,
    pub ell: Option<i32>,
    pub field: Option<String>,
    pub phi_laser: Option<String>,
    pub scenario: Option<Scenario>,
    pub polarization: Option<String>,
    pub phase_form: Option<PhaseForm>,
    pub time: Option<TimeList>,
    pub phi: Option<String>,
    pub xi: Option<f64>,
    pub xi_min: Option<f64>,
    pub xi_max: Option<f64>,
    pub extent: Option<f64>,
    pub samples: Option<usize>,
    pub duration: Option<String>,
    pub rest: Option<bool>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

macro_rules! layer {
    ($top:expr, $base:expr, $($field:ident),*) => {
        RawConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RawConfig {
    /// Values in `self` win over `base`.
    pub fn over(self, base: RawConfig) -> RawConfig {
        layer!(
            self, base, preset, species, velocity, cone_ratio, ell, field, phi_laser, scenario,
            polarization, phase_form, time, phi, xi, xi_min, xi_max, extent, samples, duration,
            rest, tol, format, out
        )
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Value as written by the user together with its atomic-unit conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub text: String,
    pub au: f64,
}

type Conversion = (&'static str, fn(f64) -> f64);

const VELOCITY_UNITS: &[Conversion] = &[
    ("cm/s", |v| units::to_atomic(v, Unit::CmPerS)),
    ("au", |v| v),
];
const FIELD_UNITS: &[Conversion] = &[
    ("GV/cm", |v| units::to_atomic(v, Unit::GvPerCm)),
    ("au", |v| v),
];
const TIME_UNITS: &[Conversion] = &[
    ("fs", |v| units::to_atomic(v, Unit::Femtosecond)),
    ("au", |v| v),
];
const ANGLE_UNITS: &[Conversion] = &[
    ("rad", |v| v),
    ("deg", |v| v.to_radians()),
    ("pi", |v| v * PI),
];

/// Plain float or a ratio `p/q` (so `1/3pi` reads as π/3).
fn parse_number(text: &str) -> Option<f64> {
    match text.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (p.trim().parse::<f64>().ok()?, q.trim().parse::<f64>().ok()?);
            (q != 0.0).then(|| p / q)
        }
        None => text.parse().ok(),
    }
}

/// Parses `"<number><unit>"`, e.g. `1.4e6cm/s` or `0.5pi`. A bare `pi`
/// stands for one π.
pub fn parse_quantity(field: &str, text: &str, table: &[Conversion]) -> Result<Quantity> {
    let t = text.trim();
    let expected = || table.iter().map(|(u, _)| *u).collect::<Vec<_>>().join(", ");
    for (unit, convert) in table {
        if let Some(number) = t.strip_suffix(unit) {
            let number = number.trim();
            let value = if number.is_empty() && *unit == "pi" {
                1.0
            } else {
                parse_number(number).ok_or_else(|| {
                    Error::Config(format!("{field}: cannot parse number in '{text}'"))
                })?
            };
            if !value.is_finite() {
                return Err(Error::Config(format!("{field}: value must be finite, got '{text}'")));
            }
            return Ok(Quantity {
                text: t.to_string(),
                au: convert(value),
            });
        }
    }
    if t.parse::<f64>().is_ok() {
        Err(Error::Config(format!(
            "{field}: missing unit in '{text}' (expected one of {})",
            expected()
        )))
    } else {
        Err(Error::Config(format!(
            "{field}: unknown unit in '{text}' (expected one of {})",
            expected()
        )))
    }
}

pub fn parse_velocity(field: &str, text: &str) -> Result<Quantity> {
    parse_quantity(field, text, VELOCITY_UNITS)
}

pub fn parse_field(field: &str, text: &str) -> Result<Quantity> {
    parse_quantity(field, text, FIELD_UNITS)
}

pub fn parse_time(field: &str, text: &str) -> Result<Quantity> {
    parse_quantity(field, text, TIME_UNITS)
}

pub fn parse_angle(field: &str, text: &str) -> Result<Quantity> {
    parse_quantity(field, text, ANGLE_UNITS)
}

fn species_alias(name: &str) -> &str {
    match name.to_ascii_lowercase().as_str() {
        "hydrogen" => "H",
        "lithium" => "Li",
        "sodium" => "Na",
        "potassium" => "K",
        _ => name,
    }
}

/// Built-in name (or its English alias) first, then a file path.
pub fn resolve_species(reference: &str) -> Result<Species> {
    let name = species_alias(reference);
    if Species::builtin_names().iter().any(|n| n.eq_ignore_ascii_case(name)) {
        return Species::builtin(name);
    }
    let path = Path::new(reference);
    if path.exists() {
        return atoms::load_species(path);
    }
    Err(Error::Config(format!(
        "--species: '{reference}' is neither a built-in species ({}) nor an existing file",
        Species::builtin_names().join(", ")
    )))
}

/// Fully resolved configuration; every value is in atomic units.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub preset: Option<String>,
    pub species_ref: String,
    pub species: Species,
    pub velocity: Option<Quantity>,
    pub cone_ratio: f64,
    pub ell: i32,
    pub field: Quantity,
    pub phi_laser: Quantity,
    pub scenario: Scenario,
    pub phase_form: PhaseForm,
    pub times: Vec<Quantity>,
    pub phi: Quantity,
    pub xi: f64,
    pub xi_range: (f64, f64),
    pub extent: f64,
    pub samples: usize,
    pub duration: Option<Quantity>,
    pub rest: bool,
    pub tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_SAMPLES: usize = 512;
pub const DEFAULT_GRID_SAMPLES: usize = 81;
pub const DEFAULT_TOL: f64 = 1e-8;

fn required<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("{flag} is required (give it directly or via --preset/--config)")))
}

impl RunConfig {
    /// Layers preset < config file < flags and validates the result.
    pub fn resolve(command: Command, flags: RawConfig, file: Option<RawConfig>) -> Result<Self> {
        let merged = flags.over(file.unwrap_or_default());
        let merged = match &merged.preset {
            Some(name) => merged.clone().over(presets::preset(name)?),
            None => merged,
        };
        Self::from_raw(command, merged)
    }

    fn from_raw(command: Command, raw: RawConfig) -> Result<Self> {
        let species_ref = match raw.species {
            Some(s) => s,
            // the oracle suite fixes its own species
            None if command == Command::Verify => "H".to_string(),
            None => required(None, "--species")?,
        };
        let species = resolve_species(&species_ref)?;
        let scenario = raw.scenario.unwrap_or(if command == Command::Rabi {
            Scenario::Collinear
        } else {
            Scenario::Crossed
        });
        if let Some(p) = &raw.polarization {
            let wanted = match p.as_str() {
                "x" => Polarization::X,
                "z" => Polarization::Z,
                _ => return Err(Error::Config(format!("--polarization: expected x or z, got '{p}'"))),
            };
            if wanted != scenario.polarization() {
                return Err(Error::Config(format!(
                    "--polarization {p} conflicts with the {scenario} scenario (which drives the {} dipole)",
                    if scenario == Scenario::Collinear { "x" } else { "z" }
                )));
            }
        }
        let rest = raw.rest.unwrap_or(false);
        let velocity = match raw.velocity {
            Some(v) => Some(parse_velocity("--velocity", &v)?),
            None if command == Command::Rabi && rest => None,
            None if command == Command::Verify => None,
            None => return Err(Error::Config("--velocity is required (give it directly or via --preset/--config)".into())),
        };
        let field = match raw.field {
            Some(f) => parse_field("--field", &f)?,
            None if command == Command::Verify => Quantity {
                text: "0au".into(),
                au: 0.0,
            },
            None => return Err(Error::Config("--field is required (give it directly or via --preset/--config)".into())),
        };
        if field.au < 0.0 {
            return Err(Error::Config(format!("--field must be non-negative, got '{}'", field.text)));
        }
        let cone_ratio = raw.cone_ratio.unwrap_or(0.2);
        if !(cone_ratio > 0.0 && cone_ratio < 1.0) {
            return Err(Error::Config(format!("--cone-ratio must lie in (0, 1), got {cone_ratio}")));
        }
        let phi_laser = parse_angle("--phi-laser", raw.phi_laser.as_deref().unwrap_or("0.5pi"))?;
        let phi = parse_angle("--phi", raw.phi.as_deref().unwrap_or("1/3pi"))?;
        let times = match raw.time {
            Some(list) => list
                .items()
                .iter()
                .map(|t| parse_time("--time", t))
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let needs_time = matches!(
            command,
            Command::Radial | Command::Azimuthal | Command::Grid | Command::Delta
        );
        if needs_time && times.is_empty() {
            return Err(Error::Config("--time is required (e.g. --time 20fs or --time 10fs,20fs)".into()));
        }
        if let Some(t) = times.iter().find(|t| t.au < 0.0) {
            return Err(Error::Config(format!("--time must be non-negative, got '{}'", t.text)));
        }
        let duration = raw
            .duration
            .map(|d| parse_time("--duration", &d))
            .transpose()?;
        let xi_range = (raw.xi_min.unwrap_or(0.0), raw.xi_max.unwrap_or(15.0));
        if !(xi_range.0 >= 0.0 && xi_range.1 > xi_range.0 && xi_range.1.is_finite()) {
            return Err(Error::Config(format!(
                "--xi-min/--xi-max must satisfy 0 ≤ min < max, got {} and {}",
                xi_range.0, xi_range.1
            )));
        }
        let xi = raw.xi.unwrap_or(3.0);
        if !(xi >= 0.0 && xi.is_finite()) {
            return Err(Error::Config(format!("--xi must be non-negative, got {xi}")));
        }
        let extent = raw.extent.unwrap_or(15.0);
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::Config(format!("--extent must be positive, got {extent}")));
        }
        let samples = raw.samples.unwrap_or(if command == Command::Grid {
            DEFAULT_GRID_SAMPLES
        } else {
            DEFAULT_SAMPLES
        });
        if samples < 2 {
            return Err(Error::Config(format!("--samples must be at least 2, got {samples}")));
        }
        let tol = raw.tol.unwrap_or(DEFAULT_TOL);
        if !(1e-12..=1e-6).contains(&tol) {
            return Err(Error::Config(format!("--tol must lie in [1e-12, 1e-6], got {tol:e}")));
        }
        let config = Self {
            command,
            preset: raw.preset,
            species_ref,
            species,
            velocity,
            cone_ratio,
            ell: raw.ell.unwrap_or(2),
            field,
            phi_laser,
            scenario,
            phase_form: raw.phase_form.unwrap_or(PhaseForm::Approx),
            times,
            phi,
            xi,
            xi_range,
            extent,
            samples,
            duration,
            rest,
            tol,
            format: raw.format.unwrap_or(Format::Csv),
            out: raw.out,
        };
        if command != Command::Verify {
            config.check_physics()?;
        }
        Ok(config)
    }

    /// Builds the physics records once so that bad values fail before any
    /// output is produced.
    fn check_physics(&self) -> Result<()> {
        self.laser()?;
        if let Some(cone) = self.cone()? {
            let beta = cone.v_perp() / SPEED_OF_LIGHT;
            if self.scenario == Scenario::Crossed && beta >= MAX_BETA {
                return Err(Error::Relativistic(beta));
            }
        }
        Ok(())
    }

    pub fn laser(&self) -> Result<LaserField> {
        LaserField::new(
            self.field.au,
            self.species.transition_energy,
            self.scenario,
            self.phi_laser.au,
        )
    }

    /// Beam cone, if a velocity was given.
    pub fn cone(&self) -> Result<Option<BeamCone>> {
        self.velocity
            .as_ref()
            .map(|v| BeamCone::from_transverse_velocity(v.au, self.cone_ratio, self.ell, self.species.mass))
            .transpose()
    }

    /// Every resolved setting as `key=value` pairs, in a fixed order.
    pub fn echo(&self) -> Vec<(String, String)> {
        let f = |v: f64| format!("{v:?}");
        let q = |q: &Quantity| format!("{} ({:?} au)", q.text, q.au);
        let mut out = vec![
            ("command".to_string(), self.command.name().to_string()),
            ("preset".to_string(), self.preset.clone().unwrap_or_else(|| "none".into())),
            ("species_ref".to_string(), self.species_ref.clone()),
            (
                "velocity".to_string(),
                self.velocity.as_ref().map(q).unwrap_or_else(|| "none".into()),
            ),
            ("cone_ratio".to_string(), f(self.cone_ratio)),
            ("ell".to_string(), self.ell.to_string()),
            ("field".to_string(), q(&self.field)),
            ("phi_laser".to_string(), q(&self.phi_laser)),
            ("scenario".to_string(), self.scenario.to_string()),
            ("phase_form".to_string(), self.phase_form.to_string()),
            (
                "time".to_string(),
                self.times.iter().map(q).collect::<Vec<_>>().join(", "),
            ),
            ("phi".to_string(), q(&self.phi)),
            ("xi".to_string(), f(self.xi)),
            ("xi_min".to_string(), f(self.xi_range.0)),
            ("xi_max".to_string(), f(self.xi_range.1)),
            ("extent".to_string(), f(self.extent)),
            ("samples".to_string(), self.samples.to_string()),
            (
                "duration".to_string(),
                self.duration.as_ref().map(q).unwrap_or_else(|| "none".into()),
            ),
            ("rest".to_string(), self.rest.to_string()),
            ("tol".to_string(), f(self.tol)),
        ];
        out.iter_mut().for_each(|(k, _)| k.insert_str(0, "config."));
        out
    }
}

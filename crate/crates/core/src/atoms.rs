//! Two-level species: analytic hydrogen 1s↔2p and file-loaded alkalis.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{self, Unit, SPEED_OF_LIGHT};

/// Hydrogen 2p–1s transition frequency, 3/8 Hartree.
pub const HYDROGEN_OMEGA: f64 = 0.375;
/// `|⟨1s|x|2p⟩| = 2⁷/3⁵` in Bohr radii.
pub const HYDROGEN_DIPOLE_X: f64 = 128.0 / 243.0;

/// Minimum transition wavelength, in Bohr radii, for the long-wave
/// approximation to hold.
pub const LWA_MIN_WAVELENGTH: f64 = 100.0;

const BUILTIN: [(&str, &str); 4] = [
    ("H", include_str!("../data/species/h.toml")),
    ("Li", include_str!("../data/species/li.toml")),
    ("Na", include_str!("../data/species/na.toml")),
    ("K", include_str!("../data/species/k.toml")),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Laser along the beam axis, polarised along x.
    Collinear,
    /// Laser in the transverse plane, polarised along z.
    Crossed,
}

impl Scenario {
    pub fn polarization(self) -> Polarization {
        match self {
            Scenario::Collinear => Polarization::X,
            Scenario::Crossed => Polarization::Z,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Collinear => "collinear",
            Scenario::Crossed => "crossed",
        })
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "collinear" => Ok(Scenario::Collinear),
            "crossed" => Ok(Scenario::Crossed),
            _ => Err(Error::Config(format!(
                "unknown scenario '{s}' (expected collinear or crossed)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    X,
    Z,
}

/// On-disk species record. Exactly one of `transition_energy_ev` and
/// `wavelength_nm` is present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesFile {
    pub name: String,
    #[serde(rename = "Z")]
    pub z: u32,
    pub mass_amu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition_energy_ev: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength_nm: Option<f64>,
    pub dipole_x_au: f64,
    pub dipole_z_au: f64,
    pub phase_x_rad: f64,
    pub phase_z_rad: f64,
    pub source: String,
}

/// Validated species in atomic units.
///
/// Level energies are measured from the upper level: `E_a = 0`,
/// `E_b = −transition_energy`.
#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    pub name: String,
    pub z: u32,
    pub mass: f64,
    pub transition_energy: f64,
    pub dipole_x: f64,
    pub dipole_z: f64,
    pub phase_x: f64,
    pub phase_z: f64,
    pub source: String,
    record: SpeciesFile,
}

impl Species {
    pub fn from_record(record: SpeciesFile) -> std::result::Result<Self, String> {
        let transition_energy = match (record.transition_energy_ev, record.wavelength_nm) {
            (Some(ev), None) => units::to_atomic(ev, Unit::ElectronVolt),
            (None, Some(nm)) => {
                if !(nm > 0.0 && nm.is_finite()) {
                    return Err(format!("wavelength_nm must be positive, got {nm}"));
                }
                units::wavelength_nm_to_energy(nm)
            }
            _ => {
                return Err(
                    "exactly one of transition_energy_ev and wavelength_nm is required".into(),
                )
            }
        };
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(format!("{field} must be positive, got {v}"))
            }
        };
        let non_negative = |field: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(format!("{field} must be non-negative, got {v}"))
            }
        };
        let finite = |field: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(format!("{field} must be finite, got {v}"))
            }
        };
        positive("mass_amu", record.mass_amu)?;
        positive("transition_energy", transition_energy)?;
        non_negative("dipole_x_au", record.dipole_x_au)?;
        non_negative("dipole_z_au", record.dipole_z_au)?;
        finite("phase_x_rad", record.phase_x_rad)?;
        finite("phase_z_rad", record.phase_z_rad)?;
        if record.name.trim().is_empty() {
            return Err("name must not be empty".into());
        }
        if record.source.trim().is_empty() {
            return Err("source must cite where the constants come from".into());
        }
        let wavelength = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / transition_energy;
        if wavelength <= LWA_MIN_WAVELENGTH {
            return Err(format!(
                "transition wavelength {wavelength:.3} a0 violates the long-wave condition (> {LWA_MIN_WAVELENGTH} a0)"
            ));
        }
        Ok(Self {
            name: record.name.clone(),
            z: record.z,
            mass: units::to_atomic(record.mass_amu, Unit::Amu),
            transition_energy,
            dipole_x: record.dipole_x_au,
            dipole_z: record.dipole_z_au,
            phase_x: record.phase_x_rad,
            phase_z: record.phase_z_rad,
            source: record.source.clone(),
            record,
        })
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let species_err = |message: String| Error::Species {
            path: origin.to_path_buf(),
            message,
        };
        let record: SpeciesFile = toml::from_str(text).map_err(|e| species_err(e.to_string()))?;
        Self::from_record(record).map_err(species_err)
    }

    /// One of the shipped species, matched case-insensitively.
    pub fn builtin(name: &str) -> Result<Self> {
        let (key, text) = BUILTIN
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown species '{name}' (built in: {})",
                    Self::builtin_names().join(", ")
                ))
            })?;
        Self::parse(text, &PathBuf::from(format!("<builtin {key}>")))
    }

    pub fn builtin_names() -> Vec<&'static str> {
        BUILTIN.iter().map(|(k, _)| *k).collect()
    }

    pub fn record(&self) -> &SpeciesFile {
        &self.record
    }

    /// `(E_a, E_b)` with the upper level at zero.
    pub fn level_energies(&self) -> (f64, f64) {
        (0.0, -self.transition_energy)
    }

    /// Dipole magnitude and phase for the given polarisation.
    pub fn dipole(&self, polarization: Polarization) -> (f64, f64) {
        match polarization {
            Polarization::X => (self.dipole_x, self.phase_x),
            Polarization::Z => (self.dipole_z, self.phase_z),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.record).expect("species record serialises")
    }
}

/// Loads and validates a species file.
pub fn load_species(path: &Path) -> Result<Species> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Species::parse(&text, path)
}

pub fn save_species(species: &Species, path: &Path) -> Result<()> {
    std::fs::write(path, species.to_toml()).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Monochromatic, linearly polarised plane wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserField {
    pub amplitude: f64,
    pub omega: f64,
    pub scenario: Scenario,
    pub phi_laser: f64,
}

impl LaserField {
    pub fn new(amplitude: f64, omega: f64, scenario: Scenario, phi_laser: f64) -> Result<Self> {
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(Error::Domain(format!(
                "field amplitude must be non-negative, got {amplitude}"
            )));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Domain(format!(
                "laser frequency must be positive, got {omega}"
            )));
        }
        Ok(Self {
            amplitude,
            omega,
            scenario,
            phi_laser: phi_laser.rem_euclid(2.0 * std::f64::consts::PI),
        })
    }

    /// Wave number `ω/c`.
    pub fn k(&self) -> f64 {
        self.omega / SPEED_OF_LIGHT
    }

    /// A zero amplitude leaves the beam free; all phase shifts are dropped.
    pub fn is_off(&self) -> bool {
        self.amplitude == 0.0
    }
}

/// `(ω, Ω_Rx, Ω_Rz)` for hydrogen 1s↔2p in field `ε₀`.
pub fn hydrogen_2p1s(field: f64) -> Result<(f64, f64, f64)> {
    if !(field >= 0.0) {
        return Err(Error::Domain(format!(
            "field amplitude must be non-negative, got {field}"
        )));
    }
    let rx = HYDROGEN_DIPOLE_X * field;
    Ok((HYDROGEN_OMEGA, rx, std::f64::consts::SQRT_2 * rx))
}

/// `Ω_R = |d|·ε₀` for the chosen dipole component.
pub fn rabi_frequency(species: &Species, field: f64, polarization: Polarization) -> f64 {
    species.dipole(polarization).0 * field
}

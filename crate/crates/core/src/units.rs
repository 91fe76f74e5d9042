//! Physical constants (CODATA 2018) and conversions between laboratory units
//! and Hartree atomic units (ħ = mₑ = e = a₀ = 1).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// CODATA 2018 constants needed by the rest of the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Fine-structure constant.
    pub alpha_fs: f64,
    /// Speed of light in atomic units, `1/α`.
    pub c: f64,
    /// Atomic unit of time, s.
    pub time_s: f64,
    /// Atomic unit of electric field, V/cm.
    pub field_v_per_cm: f64,
    /// Atomic unit of velocity, cm/s.
    pub velocity_cm_per_s: f64,
    /// Hartree energy, eV.
    pub hartree_ev: f64,
    /// Unified atomic mass unit in electron masses.
    pub amu_me: f64,
    /// Bohr radius, nm.
    pub bohr_nm: f64,
}

pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;
pub const SPEED_OF_LIGHT: f64 = 1.0 / FINE_STRUCTURE;
pub const TIME_S: f64 = 2.418_884_326_585_7e-17;
pub const FIELD_V_PER_CM: f64 = 5.142_206_747_63e9;
pub const VELOCITY_CM_PER_S: f64 = 2.187_691_263_64e8;
pub const HARTREE_EV: f64 = 27.211_386_245_988;
pub const AMU_ME: f64 = 1_822.888_486_209;
pub const BOHR_NM: f64 = 5.291_772_109_03e-2;

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    alpha_fs: FINE_STRUCTURE,
    c: SPEED_OF_LIGHT,
    time_s: TIME_S,
    field_v_per_cm: FIELD_V_PER_CM,
    velocity_cm_per_s: VELOCITY_CM_PER_S,
    hartree_ev: HARTREE_EV,
    amu_me: AMU_ME,
    bohr_nm: BOHR_NM,
};

/// Laboratory units accepted at the I/O boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    CmPerS,
    GvPerCm,
    Femtosecond,
    ElectronVolt,
    Nanometer,
    Amu,
}

impl Unit {
    pub const ALL: [Unit; 6] = [
        Unit::CmPerS,
        Unit::GvPerCm,
        Unit::Femtosecond,
        Unit::ElectronVolt,
        Unit::Nanometer,
        Unit::Amu,
    ];

    /// Size of one atomic unit expressed in this unit.
    fn atomic_unit_in_lab(self) -> f64 {
        match self {
            Unit::CmPerS => VELOCITY_CM_PER_S,
            Unit::GvPerCm => FIELD_V_PER_CM * 1e-9,
            Unit::Femtosecond => TIME_S * 1e15,
            Unit::ElectronVolt => HARTREE_EV,
            Unit::Nanometer => BOHR_NM,
            Unit::Amu => 1.0 / AMU_ME,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Unit::CmPerS => "cm/s",
            Unit::GvPerCm => "GV/cm",
            Unit::Femtosecond => "fs",
            Unit::ElectronVolt => "eV",
            Unit::Nanometer => "nm",
            Unit::Amu => "amu",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Unit::ALL
            .into_iter()
            .find(|u| u.tag() == s)
            .ok_or_else(|| Error::Config(format!("unknown unit tag `{s}`")))
    }
}

/// Converts a laboratory value to atomic units.
pub fn to_atomic(value: f64, unit: Unit) -> f64 {
    match unit {
        // mass: amu -> electron masses
        Unit::Amu => value * AMU_ME,
        _ => value / unit.atomic_unit_in_lab(),
    }
}

pub fn from_atomic(value: f64, unit: Unit) -> f64 {
    match unit {
        Unit::Amu => value / AMU_ME,
        _ => value * unit.atomic_unit_in_lab(),
    }
}

/// Parses a unit tag and converts; the string form used by config files.
pub fn to_atomic_tagged(value: f64, tag: &str) -> Result<f64> {
    Ok(to_atomic(value, tag.parse()?))
}

/// Photon energy (Hartree) of a vacuum wavelength given in nm.
pub fn wavelength_nm_to_energy(lambda_nm: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / to_atomic(lambda_nm, Unit::Nanometer)
}

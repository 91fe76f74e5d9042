//! Independent references for the closed-form states.
//!
//! Each twisted state is recomputed as the plane-wave superposition over
//! the cone azimuth `φ_p`, with the δ-function integrations done by hand.
//! The remaining integrand is smooth and 2π-periodic, so the trapezoid rule
//! converges spectrally; nodes are doubled until two iterates agree.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::atoms::{LaserField, Polarization, Scenario, Species};
use crate::beams::{self, BeamCone, DrivenState, SpacetimePoint, MAX_BETA};
use crate::error::{Error, Result};
use crate::twolevel;

pub use crate::twolevel::{ode_reference_full, ode_reference_rwa};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Initial node count, a power of two ≥ 64.
    pub nodes: usize,
    /// Maximum number of doublings.
    pub max_doublings: u32,
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes: 64,
            max_doublings: 10,
            tol: 1e-12,
        }
    }
}

impl QuadratureSpec {
    pub fn new(nodes: usize, max_doublings: u32, tol: f64) -> Result<Self> {
        let spec = Self {
            nodes,
            max_doublings,
            tol,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 64 || !self.nodes.is_power_of_two() {
            return Err(Error::Domain(format!(
                "quadrature nodes must be a power of two ≥ 64, got {}",
                self.nodes
            )));
        }
        if !(1e-12..=1e-6).contains(&self.tol) {
            return Err(Error::Domain(format!(
                "quadrature tolerance {:e} outside [1e-12, 1e-6]",
                self.tol
            )));
        }
        if self.max_doublings == 0 {
            return Err(Error::Domain("quadrature needs at least one doubling".into()));
        }
        Ok(())
    }
}

/// Converged mean `(1/2π)∫₀^{2π} f` with the sequence of iterates.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    pub nodes: usize,
    pub iterates: Vec<Complex64>,
}

/// Trapezoid mean of a 2π-periodic function, doubling until successive
/// iterates differ by less than `spec.tol`.
pub fn periodic_mean<F>(f: F, spec: &QuadratureSpec) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64,
{
    spec.validate()?;
    let mut n = spec.nodes;
    let step = 2.0 * PI / n as f64;
    let mut sum: Complex64 = (0..n).map(|j| f(j as f64 * step)).sum();
    let mut iterates = vec![sum / n as f64];
    for _ in 0..spec.max_doublings {
        let half = PI / n as f64;
        sum += (0..n).map(|j| f((2 * j + 1) as f64 * half)).sum::<Complex64>();
        n *= 2;
        let value = sum / n as f64;
        let previous = *iterates.last().unwrap();
        iterates.push(value);
        if (value - previous).norm() < spec.tol {
            return Ok(Quadrature {
                value,
                nodes: n,
                iterates,
            });
        }
    }
    let last = iterates[iterates.len() - 1];
    let previous = iterates[iterates.len() - 2];
    Err(Error::Quadrature {
        nodes: n,
        last: (last.re, last.im),
        previous: (previous.re, previous.im),
    })
}

fn i_pow(ell: i32) -> Complex64 {
    match ell.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `(2π i^ℓ)⁻¹ ∫ dφ_p e^{iℓφ_p} e^{ip·r}` over the cone, times the
/// longitudinal and temporal phase.
pub fn quad_free_twisted(cone: &BeamCone, pt: &SpacetimePoint, spec: &QuadratureSpec) -> Result<Complex64> {
    let xi = pt.xi(cone);
    let ell = cone.ell as f64;
    let q = periodic_mean(
        |p| Complex64::from_polar(1.0, ell * p + xi * (p - pt.phi).cos()),
        spec,
    )?;
    Ok(beams::translation(cone, pt) * q.value / i_pow(cone.ell))
}

fn check_crossed(cone: &BeamCone, laser: &LaserField) -> Result<()> {
    if laser.scenario != Scenario::Crossed {
        return Err(Error::Config("crossed-beam oracle needs the crossed scenario".into()));
    }
    let beta = cone.beta_perp();
    if beta >= MAX_BETA {
        return Err(Error::Relativistic(beta));
    }
    Ok(())
}

fn exact_zeta(laser: &LaserField, pt: &SpacetimePoint) -> f64 {
    if laser.is_off() {
        0.0
    } else {
        beams::laser_phase(Scenario::Crossed, laser.k(), pt, laser.phi_laser, laser.omega)
    }
}

fn assemble(species: &Species, cone: &BeamCone, pt: &SpacetimePoint, m: [Complex64; 4]) -> DrivenState {
    let (_, dipole_phase) = species.dipole(Polarization::Z);
    DrivenState {
        a: 0.5 * (m[0] + m[1]),
        b: 0.5 * Complex64::from_polar(1.0, dipole_phase) * (m[2] - m[3]),
        phase: beams::translation(cone, pt),
    }
}

/// Crossed state from the superposition with the mode exponents expanded
/// to first order in `v⊥0/c`: `𝒜ₙ ≈ 𝒞ₙ(1 + (v⊥0/c) cos(φ_L − φ_p))`.
pub fn quad_twisted_crossed_expanded(
    cone: &BeamCone,
    species: &Species,
    laser: &LaserField,
    pt: &SpacetimePoint,
    spec: &QuadratureSpec,
) -> Result<DrivenState> {
    check_crossed(cone, laser)?;
    let zeta = exact_zeta(laser, pt);
    let xi = pt.xi(cone);
    let ell = cone.ell as f64;
    let beta = cone.beta_perp();
    let constants = beams::mode_constants(species, laser);
    let mut m = [Complex64::new(0.0, 0.0); 4];
    for (slot, c) in m.iter_mut().zip(constants) {
        let s = c * zeta * beta;
        let q = periodic_mean(
            |p| {
                Complex64::from_polar(
                    1.0,
                    ell * p + xi * (p - pt.phi).cos() + s * (laser.phi_laser - p).cos(),
                )
            },
            spec,
        )?;
        *slot = Complex64::from_polar(1.0, c * zeta) * q.value / i_pow(cone.ell);
    }
    Ok(assemble(species, cone, pt, m))
}

/// `𝒜₁,₂ = −α ± Ω/2`, `𝒜₃,₄ = −β ± Ω/2` of the plane wave at cone
/// azimuth `φ_p`; exactly `𝒜ₙ = 𝒞ₙ/(1 − (v⊥0/c) cos(φ_L − φ_p))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactModeParams {
    pub a: [f64; 4],
    pub denominator: f64,
}

impl ExactModeParams {
    pub fn at(cone: &BeamCone, species: &Species, laser: &LaserField, phi_p: f64) -> Result<Self> {
        let (e_a, e_b) = species.level_energies();
        let rabi = species.dipole(Polarization::Z).0 * laser.amplitude;
        let rq = twolevel::reduced_crossed(
            e_a,
            e_b,
            rabi,
            laser.k(),
            cone.v_perp(),
            laser.phi_laser,
            phi_p,
            laser.omega,
        )?;
        let h = 0.5 * rq.omega;
        Ok(Self {
            a: [-rq.alpha + h, -rq.alpha - h, -rq.beta + h, -rq.beta - h],
            denominator: rq.denominator,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactQuadrature {
    pub state: DrivenState,
    pub nodes: usize,
    /// Nodes dropped for a near-zero Doppler denominator.
    pub excluded: usize,
}

/// Crossed state from the unexpanded superposition, with `𝒜ₙ(φ_p)` from
/// the reduced quantities at every node.
pub fn quad_twisted_crossed_exact(
    cone: &BeamCone,
    species: &Species,
    laser: &LaserField,
    pt: &SpacetimePoint,
    spec: &QuadratureSpec,
) -> Result<ExactQuadrature> {
    check_crossed(cone, laser)?;
    let zeta = exact_zeta(laser, pt);
    let xi = pt.xi(cone);
    let ell = cone.ell as f64;
    let excluded = std::cell::Cell::new(0usize);
    let mut m = [Complex64::new(0.0, 0.0); 4];
    let mut nodes = 0;
    for (n, slot) in m.iter_mut().enumerate() {
        let q = periodic_mean(
            |p| match ExactModeParams::at(cone, species, laser, p) {
                Ok(params) if params.denominator.abs() >= 1e-9 * laser.omega => {
                    Complex64::from_polar(1.0, ell * p + xi * (p - pt.phi).cos() + params.a[n] * zeta)
                }
                _ => {
                    log::warn!("excluding quadrature node φ_p = {p}: degenerate Doppler denominator");
                    excluded.set(excluded.get() + 1);
                    Complex64::new(0.0, 0.0)
                }
            },
            spec,
        )?;
        nodes = nodes.max(q.nodes);
        *slot = q.value / i_pow(cone.ell);
    }
    Ok(ExactQuadrature {
        state: assemble(species, cone, pt, m),
        nodes,
        excluded: excluded.get(),
    })
}

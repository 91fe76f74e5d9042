//! Wavefunctions of free and laser-driven twisted atoms.
//!
//! A twisted beam is the superposition of plane waves on the cone
//! `|p| = p₀`, polar angle `θ₀`, weighted by `e^{iℓφ_p}`. The azimuthal
//! integral is done analytically everywhere in this module; the numerical
//! versions live in `oracles`.
//!
//! In the crossed geometry each plane wave splits into four dressed modes
//! `e^{i𝒜ₙζ}`, and to first order in `v⊥0/c` each mode integrates to a
//! Bessel function of shifted coordinates `(Ξₙ, Φₙ)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::atoms::{LaserField, Polarization, Scenario, Species};
use crate::error::{Error, Result};
use crate::specfun::jn;
use crate::twolevel::{self, TwoLevelAmplitudes};
use crate::units::SPEED_OF_LIGHT;

/// Upper bound on `v⊥0/c` for the first-order mode expansion.
pub const MAX_BETA: f64 = 0.1;

/// Amplitudes below this are treated as nodes by the OAM probes.
pub const NODE_THRESHOLD: f64 = 1e-13;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Monoenergetic momentum cone of a Bessel beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamCone {
    pub p0: f64,
    pub theta0: f64,
    pub ell: i32,
    pub mass: f64,
}

impl BeamCone {
    pub fn new(p0: f64, theta0: f64, ell: i32, mass: f64) -> Result<Self> {
        if !(p0 > 0.0 && p0.is_finite()) {
            return Err(Error::Domain(format!("cone momentum must be positive, got {p0}")));
        }
        if !(theta0 > 0.0 && theta0 < 0.5 * PI) {
            return Err(Error::Domain(format!(
                "opening angle must lie in (0, π/2), got {theta0}"
            )));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        Ok(Self {
            p0,
            theta0,
            ell,
            mass,
        })
    }

    /// Cone fixed by the transverse speed `p⊥0/m` and `p⊥0/p₀`.
    pub fn from_transverse_velocity(v_perp: f64, cone_ratio: f64, ell: i32, mass: f64) -> Result<Self> {
        if !(cone_ratio > 0.0 && cone_ratio < 1.0) {
            return Err(Error::Domain(format!(
                "cone ratio p⊥0/p0 must lie in (0, 1), got {cone_ratio}"
            )));
        }
        if !(v_perp > 0.0 && v_perp.is_finite()) {
            return Err(Error::Domain(format!(
                "transverse velocity must be positive, got {v_perp}"
            )));
        }
        Self::new(mass * v_perp / cone_ratio, cone_ratio.asin(), ell, mass)
    }

    pub fn p_par(&self) -> f64 {
        self.p0 * self.theta0.cos()
    }

    pub fn p_perp(&self) -> f64 {
        self.p0 * self.theta0.sin()
    }

    pub fn v_perp(&self) -> f64 {
        self.p_perp() / self.mass
    }

    pub fn v_par(&self) -> f64 {
        self.p_par() / self.mass
    }

    /// Kinetic energy `p₀²/2m`.
    pub fn energy(&self) -> f64 {
        0.5 * self.p0 * self.p0 / self.mass
    }

    /// `v⊥0/c`.
    pub fn beta_perp(&self) -> f64 {
        self.v_perp() / SPEED_OF_LIGHT
    }
}

/// Point in cylindrical coordinates plus time, all in atomic units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimePoint {
    pub r: f64,
    pub phi: f64,
    pub z: f64,
    pub t: f64,
}

impl SpacetimePoint {
    pub fn new(r: f64, phi: f64, z: f64, t: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("radius must be non-negative, got {r}")));
        }
        if !(phi.is_finite() && z.is_finite() && t.is_finite()) {
            return Err(Error::Domain("non-finite spacetime coordinate".into()));
        }
        Ok(Self { r, phi, z, t })
    }

    /// Point at dimensionless radius `ξ = p⊥0 r`.
    pub fn from_xi(cone: &BeamCone, xi: f64, phi: f64, z: f64, t: f64) -> Result<Self> {
        Self::new(xi / cone.p_perp(), phi, z, t)
    }

    pub fn xi(&self, cone: &BeamCone) -> f64 {
        cone.p_perp() * self.r
    }

    /// `p⊥0 z`.
    pub fn z_scaled(&self, cone: &BeamCone) -> f64 {
        cone.p_perp() * self.z
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseForm {
    /// Laser phase with its spatial part, `ζ = k r cos(φ_L − φ) − ωt`.
    Exact,
    /// `ζ ≈ −ωt`.
    Approx,
}

impl fmt::Display for PhaseForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseForm::Exact => "exact",
            PhaseForm::Approx => "approx",
        })
    }
}

impl FromStr for PhaseForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(PhaseForm::Exact),
            "approx" => Ok(PhaseForm::Approx),
            _ => Err(Error::Config(format!(
                "unknown phase form '{s}' (expected exact or approx)"
            ))),
        }
    }
}

/// Internal state on `{|a⟩, |b⟩}` times a unit-modulus translation factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivenState {
    pub a: Complex64,
    pub b: Complex64,
    pub phase: Complex64,
}

impl DrivenState {
    /// Full coefficients including the translation factor.
    pub fn amplitudes(&self) -> TwoLevelAmplitudes {
        TwoLevelAmplitudes::new(self.phase * self.a, self.phase * self.b)
    }

    pub fn internal(&self) -> TwoLevelAmplitudes {
        TwoLevelAmplitudes::new(self.a, self.b)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }
}

/// `e^{i(p∥0 z − 𝓔₀t)}`.
pub fn translation(cone: &BeamCone, pt: &SpacetimePoint) -> Complex64 {
    Complex64::from_polar(1.0, cone.p_par() * pt.z - cone.energy() * pt.t)
}

/// `e^{i(p∥0 z − 𝓔₀t)} e^{iℓφ} J_ℓ(ξ)`.
pub fn free_twisted_state(cone: &BeamCone, pt: &SpacetimePoint) -> Complex64 {
    translation(cone, pt)
        * Complex64::from_polar(1.0, cone.ell as f64 * pt.phi)
        * jn(cone.ell, pt.xi(cone))
}

/// `ζ = k·r − ωt` for the laser geometry.
pub fn laser_phase(scenario: Scenario, k: f64, pt: &SpacetimePoint, phi_laser: f64, omega: f64) -> f64 {
    match scenario {
        Scenario::Collinear => k * pt.z - omega * pt.t,
        Scenario::Crossed => k * pt.r * (phi_laser - pt.phi).cos() - omega * pt.t,
    }
}

/// Rabi frequency and dipole phase for the laser's polarisation.
pub fn coupling(species: &Species, laser: &LaserField) -> (f64, f64) {
    let (d, phase) = species.dipole(laser.scenario.polarization());
    (d * laser.amplitude, phase)
}

fn resonant_pair(rq: &twolevel::ReducedQuantities, zeta: f64, dipole_phase: f64) -> (Complex64, Complex64) {
    let s = twolevel::resonant_amplitudes(zeta, rq.omega, dipole_phase)
        .to_level_amplitudes(rq, zeta);
    (s.a, s.b)
}

/// Plane-wave state of momentum `p = (p_x, p_y, p_z)` for an atom switched
/// on in the upper level.
pub fn driven_plane_wave(
    species: &Species,
    laser: &LaserField,
    p: [f64; 3],
    pt: &SpacetimePoint,
) -> Result<DrivenState> {
    let (e_a, e_b) = species.level_energies();
    let (rabi, dipole_phase) = coupling(species, laser);
    let k = laser.k();
    let v = p.map(|c| c / species.mass);
    let doppler = match laser.scenario {
        Scenario::Collinear => k * v[2],
        Scenario::Crossed => k * (v[0] * laser.phi_laser.cos() + v[1] * laser.phi_laser.sin()),
    };
    let rq = twolevel::ReducedQuantities::new(e_a, e_b, rabi, doppler - laser.omega)?;
    let zeta = laser_phase(laser.scenario, k, pt, laser.phi_laser, laser.omega);
    let (a, b) = resonant_pair(&rq, zeta, dipole_phase);
    let (x, y) = (pt.r * pt.phi.cos(), pt.r * pt.phi.sin());
    let p_sqr = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    let phase = Complex64::from_polar(
        1.0,
        p[0] * x + p[1] * y + p[2] * pt.z - 0.5 * p_sqr / species.mass * pt.t,
    );
    Ok(DrivenState { a, b, phase })
}

fn require(laser: &LaserField, scenario: Scenario) -> Result<()> {
    if laser.scenario == scenario {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "operation needs the {scenario} scenario, laser is {}",
            laser.scenario
        )))
    }
}

/// Twisted state in the collinear geometry.
pub fn twisted_collinear(
    cone: &BeamCone,
    species: &Species,
    laser: &LaserField,
    pt: &SpacetimePoint,
) -> Result<DrivenState> {
    require(laser, Scenario::Collinear)?;
    let (e_a, e_b) = species.level_energies();
    let (rabi, dipole_phase) = coupling(species, laser);
    let rq = twolevel::reduced_collinear(e_a, e_b, rabi, laser.k(), cone.v_par(), laser.omega)?;
    let zeta = if laser.is_off() {
        0.0
    } else {
        laser_phase(Scenario::Collinear, laser.k(), pt, laser.phi_laser, laser.omega)
    };
    let (a, b) = resonant_pair(&rq, zeta, dipole_phase);
    let profile = Complex64::from_polar(1.0, cone.ell as f64 * pt.phi) * jn(cone.ell, pt.xi(cone));
    Ok(DrivenState {
        a: a * profile,
        b: b * profile,
        phase: translation(cone, pt),
    })
}

/// `𝒞₁,₂ = (E_a ∓ Ω_Rz/2)/ω`, `𝒞₃,₄ = (E_b ∓ Ω_Rz/2)/ω`.
pub fn mode_constants(species: &Species, laser: &LaserField) -> [f64; 4] {
    let (e_a, e_b) = species.level_energies();
    let half = 0.5 * species.dipole(Polarization::Z).0 * laser.amplitude;
    let w = laser.omega;
    [(e_a - half) / w, (e_a + half) / w, (e_b - half) / w, (e_b + half) / w]
}

/// Shifted coordinates of one dressed mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// `𝒞ₙ`.
    pub constant: f64,
    /// `𝒞ₙζ v⊥0/c`, the displacement of the mode centre.
    pub shift: f64,
    pub x: f64,
    pub y: f64,
    /// `Ξₙ`.
    pub radius: f64,
    /// `Φₙ ∈ (−π, π]`, or `φ` itself when the shift vanishes.
    pub angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoordinates {
    pub form: PhaseForm,
    /// Laser phase entering `e^{i𝒞ₙζ}`; zero with the laser off.
    pub zeta: f64,
    pub modes: [Mode; 4],
}

fn check_beta(cone: &BeamCone) -> Result<()> {
    let beta = cone.beta_perp();
    if beta < MAX_BETA {
        Ok(())
    } else {
        Err(Error::Relativistic(beta))
    }
}

/// Mode coordinates `(𝒳ₙ, 𝒴ₙ) = ξ(cos φ, sin φ) + 𝒞ₙζ(v⊥0/c)(cos φ_L, sin φ_L)`.
pub fn mode_coordinates(
    cone: &BeamCone,
    species: &Species,
    laser: &LaserField,
    pt: &SpacetimePoint,
    form: PhaseForm,
) -> Result<ModeCoordinates> {
    require(laser, Scenario::Crossed)?;
    check_beta(cone)?;
    let zeta = if laser.is_off() {
        0.0
    } else {
        match form {
            PhaseForm::Exact => laser_phase(Scenario::Crossed, laser.k(), pt, laser.phi_laser, laser.omega),
            PhaseForm::Approx => -laser.omega * pt.t,
        }
    };
    let xi = pt.xi(cone);
    let beta = cone.beta_perp();
    let (sl, cl) = laser.phi_laser.sin_cos();
    let (sp, cp) = pt.phi.sin_cos();
    let modes = mode_constants(species, laser).map(|c| {
        let shift = c * zeta * beta;
        let (x, y) = (xi * cp + shift * cl, xi * sp + shift * sl);
        let (radius, angle) = if shift == 0.0 {
            (xi, pt.phi)
        } else {
            (x.hypot(y), y.atan2(x))
        };
        Mode {
            constant: c,
            shift,
            x,
            y,
            radius,
            angle,
        }
    });
    Ok(ModeCoordinates { form, zeta, modes })
}

/// Single mode `e^{i𝒞ₙζ} e^{iℓΦₙ} J_ℓ(Ξₙ)`, `n ∈ 0..4`.
pub fn crossed_mode(coords: &ModeCoordinates, n: usize, ell: i32) -> Complex64 {
    let m = &coords.modes[n];
    Complex64::from_polar(1.0, m.constant * coords.zeta + ell as f64 * m.angle) * jn(ell, m.radius)
}

/// Four-mode twisted state in the crossed geometry.
pub fn twisted_crossed(
    cone: &BeamCone,
    species: &Species,
    laser: &LaserField,
    pt: &SpacetimePoint,
    form: PhaseForm,
) -> Result<DrivenState> {
    let coords = mode_coordinates(cone, species, laser, pt, form)?;
    let (_, dipole_phase) = species.dipole(Polarization::Z);
    let m: [Complex64; 4] = std::array::from_fn(|n| crossed_mode(&coords, n, cone.ell));
    Ok(DrivenState {
        a: 0.5 * (m[0] + m[1]),
        b: 0.5 * Complex64::from_polar(1.0, dipole_phase) * (m[2] - m[3]),
        phase: translation(cone, pt),
    })
}

fn mode_index(n: usize) -> Result<usize> {
    if (1..=4).contains(&n) {
        Ok(n - 1)
    } else {
        Err(Error::Domain(format!("mode index must be 1..=4, got {n}")))
    }
}

/// Displacement `𝒞ₙ v⊥0 k t` relating physical and mode coordinates in the
/// approximate phase form: `ξ e^{iφ} = Ξₙ e^{iΦₙ} + sₙ e^{iφ_L}`.
fn approx_offset(cone: &BeamCone, species: &Species, laser: &LaserField, t: f64, n: usize) -> f64 {
    if laser.is_off() {
        0.0
    } else {
        mode_constants(species, laser)[n] * cone.v_perp() * laser.k() * t
    }
}

/// Evaluates mode `n` (zero-based) at mode coordinates `(Ξ, Φ)` by mapping
/// back to the physical point and rebuilding the coordinates from there.
#[allow(clippy::too_many_arguments)]
fn mode_at(
    cone: &BeamCone,
    species: &Species,
    laser: &LaserField,
    t: f64,
    n: usize,
    offset: f64,
    radius: f64,
    angle: f64,
) -> Result<Complex64> {
    let (sl, cl) = laser.phi_laser.sin_cos();
    let (sa, ca) = angle.sin_cos();
    let (x, y) = (radius * ca + offset * cl, radius * sa + offset * sl);
    let pt = SpacetimePoint::from_xi(cone, x.hypot(y), y.atan2(x), 0.0, t)?;
    let coords = mode_coordinates(cone, species, laser, &pt, PhaseForm::Approx)?;
    Ok(crossed_mode(&coords, n, cone.ell))
}

// Richardson-extrapolated central difference, error O(h⁴).
fn derivative<F>(f: F, x: f64, h: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let d = |h: f64| -> Result<Complex64> { Ok((f(x + h)? - f(x - h)?) / (2.0 * h)) };
    let coarse = d(h)?;
    let fine = d(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

const OAM_STEP: f64 = 1e-3;

/// `(−i∂/∂Φₙ Ψ⁽ⁿ⁾)/Ψ⁽ⁿ⁾` by finite differences on the ring of constant
/// `Ξₙ` through `pt`. Mode index `n ∈ 1..=4`; approximate phase form.
pub fn oam_apply_mode(
    cone: &BeamCone,
    species: &Species,
    laser: &LaserField,
    pt: &SpacetimePoint,
    n: usize,
) -> Result<Complex64> {
    let n = mode_index(n)?;
    let coords = mode_coordinates(cone, species, laser, pt, PhaseForm::Approx)?;
    let centre = crossed_mode(&coords, n, cone.ell);
    if centre.norm() < NODE_THRESHOLD {
        return Err(Error::Node(centre.norm()));
    }
    let m = coords.modes[n];
    let offset = approx_offset(cone, species, laser, pt.t, n);
    let d = derivative(
        |a| mode_at(cone, species, laser, pt.t, n, offset, m.radius, a),
        m.angle,
        OAM_STEP,
    )?;
    Ok(-I * d / centre)
}

/// `(−i∂/∂φ Ψ)/Ψ` for both internal components of the collinear state.
pub fn oam_apply_collinear(
    cone: &BeamCone,
    species: &Species,
    laser: &LaserField,
    pt: &SpacetimePoint,
) -> Result<[Complex64; 2]> {
    let centre = twisted_collinear(cone, species, laser, pt)?;
    let at = |phi: f64| twisted_collinear(cone, species, laser, &SpacetimePoint { phi, ..*pt });
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (i, slot) in out.iter_mut().enumerate() {
        let pick = |s: DrivenState| if i == 0 { s.a } else { s.b };
        let c = pick(centre);
        if c.norm() < NODE_THRESHOLD {
            return Err(Error::Node(c.norm()));
        }
        let d = derivative(|phi| at(phi).map(pick), pt.phi, OAM_STEP)?;
        *slot = -I * d / c;
    }
    Ok(out)
}

/// Tensor grid over the disc `Ξ ≤ R_max`: midpoint rule in `Ξ`, periodic
/// trapezoid in `Φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OamGrid {
    pub radial: usize,
    pub angular: usize,
}

impl Default for OamGrid {
    fn default() -> Self {
        Self {
            radial: 400,
            angular: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OamOperator {
    /// `∂_Φ` plus both displacement corrections.
    Full,
    /// `∂_Φ` only.
    Leading,
}

/// `⟨ℓ̂⟩` of mode `n ∈ 1..=4` at time `t` over the disc `Ξₙ ≤ r_max`, in
/// units of ħ. In mode coordinates the operator reads
/// `−i[∂_Φ + sₙ cos(Φ−φ_L)/Ξ ∂_Φ + sₙ sin(Φ−φ_L) ∂_Ξ]`.
#[allow(clippy::too_many_arguments)]
pub fn oam_expectation_mode(
    cone: &BeamCone,
    species: &Species,
    laser: &LaserField,
    t: f64,
    n: usize,
    r_max: f64,
    grid: OamGrid,
    operator: OamOperator,
) -> Result<f64> {
    use rayon::prelude::*;

    let n = mode_index(n)?;
    if !(r_max >= 20.0 && r_max.is_finite()) {
        return Err(Error::Domain(format!("R_max must be at least 20, got {r_max}")));
    }
    if grid.radial < 2 || grid.angular < 4 {
        return Err(Error::Domain("OAM grid needs ≥ 2 radial and ≥ 4 angular nodes".into()));
    }
    let offset = approx_offset(cone, species, laser, t, n);
    let dr = r_max / grid.radial as f64;
    let dphi = 2.0 * PI / grid.angular as f64;
    let eval = |radius: f64, angle: f64| mode_at(cone, species, laser, t, n, offset, radius, angle);

    let rings: Vec<(Complex64, f64)> = (0..grid.radial)
        .into_par_iter()
        .map(|i| -> Result<(Complex64, f64)> {
            let radius = (i as f64 + 0.5) * dr;
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = 0.0;
            for j in 0..grid.angular {
                let angle = j as f64 * dphi;
                let psi = eval(radius, angle)?;
                let d_angle = derivative(|a| eval(radius, a), angle, OAM_STEP)?;
                let mut l_psi = d_angle;
                if operator == OamOperator::Full && offset != 0.0 {
                    let (s, c) = (angle - laser.phi_laser).sin_cos();
                    let d_radius = derivative(|r| eval(r, angle), radius, OAM_STEP)?;
                    l_psi += offset * c / radius * d_angle + offset * s * d_radius;
                }
                num += psi.conj() * (-I * l_psi);
                den += psi.norm_sqr();
            }
            Ok((num * radius, den * radius))
        })
        .collect::<Result<_>>()?;
    let (num, den) = rings
        .iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(n, d), (a, b)| (n + a, d + b));
    Ok(num.re / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{self, Unit};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fig3(name: &str, field_gv: f64) -> (BeamCone, Species, LaserField) {
        let species = Species::builtin(name).unwrap();
        let v = if name == "H" { 1.4e6 } else { 0.7e6 };
        let cone = BeamCone::from_transverse_velocity(
            units::to_atomic(v, Unit::CmPerS),
            0.2,
            2,
            species.mass,
        )
        .unwrap();
        let laser = LaserField::new(
            units::to_atomic(field_gv, Unit::GvPerCm),
            species.transition_energy,
            Scenario::Crossed,
            0.5 * PI,
        )
        .unwrap();
        (cone, species, laser)
    }

    fn collinear(laser: &LaserField) -> LaserField {
        LaserField {
            scenario: Scenario::Collinear,
            ..*laser
        }
    }

    fn fs(t: f64) -> f64 {
        units::to_atomic(t, Unit::Femtosecond)
    }

    #[test]
    fn cone_geometry() {
        let cone = BeamCone::new(3.0, 0.4, 1, 1000.0).unwrap();
        let (a, b) = (cone.p_par(), cone.p_perp());
        assert!((a * a + b * b - 9.0).abs() <= 9.0 * 1e-14);
        assert!(BeamCone::new(3.0, 0.0, 1, 1000.0).is_err());
        assert!(BeamCone::new(3.0, 0.5 * PI, 1, 1000.0).is_err());
        let c = BeamCone::from_transverse_velocity(0.01, 0.2, 2, 1837.0).unwrap();
        assert!((c.v_perp() - 0.01).abs() < 1e-15);
        assert!((c.p_perp() / c.p0 - 0.2).abs() < 1e-15);
    }

    #[test]
    fn free_state_examples() {
        let cone = BeamCone::new(3.0, 0.4, 2, 1000.0).unwrap();
        let origin = SpacetimePoint::new(0.0, 0.3, 0.0, 0.0).unwrap();
        assert_eq!(free_twisted_state(&cone, &origin).norm(), 0.0);
        let cone0 = BeamCone { ell: 0, ..cone };
        assert!((free_twisted_state(&cone0, &origin) - 1.0).norm() < 1e-15);
        assert!(SpacetimePoint::new(-1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn laser_phase_forms() {
        let pt = SpacetimePoint::new(2.0, 0.7, 0.0, 0.0).unwrap();
        assert_eq!(laser_phase(Scenario::Collinear, 0.01, &pt, 0.0, 0.3), 0.0);
        let pt = SpacetimePoint::new(2.0, 0.7 + 0.5 * PI, 1.0, 5.0).unwrap();
        let z = laser_phase(Scenario::Crossed, 0.01, &pt, 0.7, 0.3);
        assert!((z + 1.5).abs() < 1e-15);
        let (cone, _, laser) = fig3("H", 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (xi, phi, t) = (rng.gen_range(0.0..15.0), rng.gen_range(0.0..6.3), rng.gen_range(0.0..900.0));
            let pt = SpacetimePoint::from_xi(&cone, xi, phi, 0.0, t).unwrap();
            let r_form = laser_phase(Scenario::Crossed, laser.k(), &pt, laser.phi_laser, laser.omega);
            let xi_form = laser.k() / cone.p_perp() * xi * (laser.phi_laser - phi).cos() - laser.omega * t;
            assert!((r_form - xi_form).abs() <= 1e-12 * r_form.abs().max(1.0));
        }
    }

    #[test]
    fn plane_wave_starts_upper_and_conserves_norm() {
        let (_, species, laser) = fig3("Na", 4.0);
        let pt = SpacetimePoint::new(0.0, 0.0, 0.0, 0.0).unwrap();
        let s = driven_plane_wave(&species, &laser, [3.0, -1.0, 20.0], &pt).unwrap();
        assert_eq!(s.internal(), TwoLevelAmplitudes::upper());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let l = if rng.gen_bool(0.5) { laser } else { collinear(&laser) };
            let p = [rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0)];
            let pt = SpacetimePoint::new(rng.gen_range(0.0..100.0), rng.gen_range(0.0..6.3), rng.gen_range(-50.0..50.0), rng.gen_range(0.0..2000.0)).unwrap();
            let s = driven_plane_wave(&species, &l, p, &pt).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            assert!((s.amplitudes().norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_matches_ode_at_resonance() {
        let (_, species, laser) = fig3("H", 4.0);
        let laser = collinear(&laser);
        // at rest the drive is exactly resonant
        let (e_a, e_b) = species.level_energies();
        let (rabi, phase) = coupling(&species, &laser);
        let rq = twolevel::reduced_collinear(e_a, e_b, rabi, laser.k(), 0.0, laser.omega).unwrap();
        assert!(twolevel::is_resonant(&rq, 1e-12));
        for t in [0.0, 10.0, 37.5, 120.0] {
            let pt = SpacetimePoint::new(0.0, 0.0, 3.0, t).unwrap();
            let s = driven_plane_wave(&species, &laser, [0.0, 0.0, 0.0], &pt).unwrap();
            let zeta = laser_phase(Scenario::Collinear, laser.k(), &pt, 0.0, laser.omega);
            let ode = twolevel::ode_reference_rwa(
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                zeta,
                &rq,
                phase,
                1e-10,
            )
            .unwrap()
            .to_level_amplitudes(&rq, zeta);
            assert!(s.internal().distance(&ode) < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn collinear_density_is_bessel_squared() {
        let (cone, species, laser) = fig3("K", 4.0);
        let laser = collinear(&laser);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let xi = rng.gen_range(0.0..15.0);
            let pt = SpacetimePoint::from_xi(&cone, xi, rng.gen_range(0.0..6.3), rng.gen_range(-100.0..100.0), rng.gen_range(0.0..4000.0)).unwrap();
            let s = twisted_collinear(&cone, &species, &laser, &pt).unwrap();
            let j = jn(2, pt.xi(&cone));
            assert!((s.norm_sqr() - j * j).abs() < 1e-14);
        }
    }

    #[test]
    fn reduction_chain_laser_off() {
        let (cone, species, laser) = fig3("Li", 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let pt = SpacetimePoint::from_xi(&cone, rng.gen_range(0.0..15.0), rng.gen_range(-3.0..3.0), rng.gen_range(-10.0..10.0), rng.gen_range(0.0..2000.0)).unwrap();
            let free = free_twisted_state(&cone, &pt);
            for form in [PhaseForm::Exact, PhaseForm::Approx] {
                let s = twisted_crossed(&cone, &species, &laser, &pt, form).unwrap();
                assert!((s.amplitudes().a - free).norm() < 1e-12);
                assert_eq!(s.b.norm(), 0.0);
            }
            let s = twisted_collinear(&cone, &species, &collinear(&laser), &pt).unwrap();
            assert!((s.amplitudes().a - free).norm() < 1e-12);
            assert_eq!(s.b.norm(), 0.0);
        }
    }

    #[test]
    fn zero_coupling_cancels_lower_level() {
        // field on in name only: a species without a z dipole
        let (cone, species, laser) = fig3("Na", 4.0);
        let mut record = species.record().clone();
        record.dipole_z_au = 0.0;
        let species = Species::from_record(record).unwrap();
        let c = mode_constants(&species, &laser);
        assert_eq!(c[0], c[1]);
        assert_eq!(c[2], c[3]);
        let pt = SpacetimePoint::from_xi(&cone, 4.0, 1.0, 0.0, fs(20.0)).unwrap();
        let s = twisted_crossed(&cone, &species, &laser, &pt, PhaseForm::Exact).unwrap();
        assert_eq!(s.b.norm(), 0.0);
    }

    #[test]
    fn mode_constant_relations() {
        let (_, species, laser) = fig3("H", 4.0);
        let c = mode_constants(&species, &laser);
        let ratio = species.dipole_z * laser.amplitude / laser.omega;
        assert!((c[0] - c[1] + ratio).abs() < 1e-15);
        assert!((c[2] - c[3] + ratio).abs() < 1e-15);
        assert!((c[0] - c[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mode_coordinates_consistency() {
        let (cone, species, laser) = fig3("K", 4.0);
        let beta = cone.beta_perp();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let (xi, phi) = (rng.gen_range(0.0..15.0), rng.gen_range(-PI..PI));
            let pt = SpacetimePoint::from_xi(&cone, xi, phi, 0.0, rng.gen_range(0.0..fs(100.0))).unwrap();
            for form in [PhaseForm::Exact, PhaseForm::Approx] {
                let mc = mode_coordinates(&cone, &species, &laser, &pt, form).unwrap();
                for m in mc.modes {
                    assert!((m.radius * m.angle.cos() - m.x).abs() < 1e-12);
                    assert!((m.radius * m.angle.sin() - m.y).abs() < 1e-12);
                    let s = m.constant * mc.zeta * beta;
                    let xi = pt.xi(&cone);
                    let radical = (xi * xi + 2.0 * xi * s * (laser.phi_laser - pt.phi).cos() + s * s).sqrt();
                    assert!((m.radius - radical).abs() < 1e-12);
                    assert!(m.angle > -PI && m.angle <= PI);
                }
            }
        }
        // approximate form at t = 0 leaves the radius untouched
        let pt = SpacetimePoint::from_xi(&cone, 3.3, 0.4, 0.0, 0.0).unwrap();
        let mc = mode_coordinates(&cone, &species, &laser, &pt, PhaseForm::Approx).unwrap();
        for m in mc.modes {
            assert_eq!(m.radius, pt.xi(&cone));
        }
        // the dropped quadratic term of the shift
        let pt = SpacetimePoint::from_xi(&cone, 6.0, 0.4, 0.0, fs(20.0)).unwrap();
        let mc = mode_coordinates(&cone, &species, &laser, &pt, PhaseForm::Approx).unwrap();
        let xi = pt.xi(&cone);
        for m in mc.modes {
            let s = m.constant * cone.v_perp() * laser.k() * pt.t;
            let linear = (xi * xi - 2.0 * xi * s * (laser.phi_laser - pt.phi).cos()).sqrt();
            assert!((m.radius - linear).abs() <= s * s / xi);
        }
    }

    #[test]
    fn laser_off_coordinates_are_physical() {
        let (cone, species, laser) = fig3("H", 0.0);
        let pt = SpacetimePoint::from_xi(&cone, 7.0, 2.5, 0.0, fs(50.0)).unwrap();
        let mc = mode_coordinates(&cone, &species, &laser, &pt, PhaseForm::Exact).unwrap();
        for m in mc.modes {
            assert_eq!((m.radius, m.angle), (pt.xi(&cone), pt.phi));
        }
    }

    #[test]
    fn relativistic_guard() {
        let (_, species, laser) = fig3("H", 4.0);
        let cone = BeamCone::from_transverse_velocity(0.2 * SPEED_OF_LIGHT, 0.2, 2, species.mass).unwrap();
        let pt = SpacetimePoint::new(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            mode_coordinates(&cone, &species, &laser, &pt, PhaseForm::Approx),
            Err(Error::Relativistic(_))
        ));
    }

    #[test]
    fn scenario_mismatch_is_rejected() {
        let (cone, species, laser) = fig3("H", 4.0);
        let pt = SpacetimePoint::new(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(twisted_collinear(&cone, &species, &laser, &pt), Err(Error::Config(_))));
        assert!(twisted_crossed(&cone, &species, &collinear(&laser), &pt, PhaseForm::Exact).is_err());
    }

    #[test]
    fn crossed_internal_norm_bounded() {
        let (cone, species, laser) = fig3("K", 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let pt = SpacetimePoint::from_xi(&cone, rng.gen_range(0.0..15.0), rng.gen_range(0.0..6.3), 0.0, rng.gen_range(0.0..fs(100.0))).unwrap();
            let form = if rng.gen_bool(0.5) { PhaseForm::Exact } else { PhaseForm::Approx };
            let s = twisted_crossed(&cone, &species, &laser, &pt, form).unwrap();
            assert!(s.norm_sqr() <= 1.0 + 1e-14);
        }
    }

    #[test]
    fn phase_forms_coincide_at_zero_velocity_term() {
        // v⊥0 → tiny, r = 0: the spatial laser phase vanishes
        let (cone, species, laser) = fig3("H", 4.0);
        let pt = SpacetimePoint::new(0.0, 0.3, 0.0, fs(15.0)).unwrap();
        let a = twisted_crossed(&cone, &species, &laser, &pt, PhaseForm::Exact).unwrap();
        let b = twisted_crossed(&cone, &species, &laser, &pt, PhaseForm::Approx).unwrap();
        assert!(a.amplitudes().distance(&b.amplitudes()) < 1e-12);
    }

    #[test]
    fn phase_forms_agree_for_hydrogen() {
        let (cone, species, laser) = fig3("H", 4.0);
        let mut worst: f64 = 0.0;
        for t in [10.0, 15.0, 20.0] {
            for i in 0..=150 {
                for j in 0..16 {
                    let pt = SpacetimePoint::from_xi(&cone, 0.1 * i as f64, j as f64 * PI / 8.0, 0.0, fs(t)).unwrap();
                    let a = twisted_crossed(&cone, &species, &laser, &pt, PhaseForm::Exact).unwrap();
                    let b = twisted_crossed(&cone, &species, &laser, &pt, PhaseForm::Approx).unwrap();
                    worst = worst.max(a.internal().distance(&b.internal()));
                }
            }
        }
        // relative to the peak amplitude max|J₂| ≈ 0.4865
        assert!(worst / 0.4865 < 5e-3, "{worst}");
    }

    #[test]
    fn mode_oam_eigenvalue() {
        let (cone, species, laser) = fig3("Na", 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..32 {
            let pt = SpacetimePoint::from_xi(&cone, rng.gen_range(0.5..14.0), rng.gen_range(0.0..6.3), 0.0, fs(rng.gen_range(0.0..100.0))).unwrap();
            for n in 1..=4 {
                match oam_apply_mode(&cone, &species, &laser, &pt, n) {
                    Ok(l) => assert!((l - 2.0).norm() < 1e-8, "{l}"),
                    Err(Error::Node(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
        let cone0 = BeamCone { ell: 0, ..cone };
        let pt = SpacetimePoint::from_xi(&cone, 1.0, 0.2, 0.0, fs(20.0)).unwrap();
        assert!(oam_apply_mode(&cone0, &species, &laser, &pt, 3).unwrap().norm() < 1e-8);
        assert!(oam_apply_mode(&cone, &species, &laser, &pt, 0).is_err());
        let origin = SpacetimePoint::new(0.0, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(oam_apply_mode(&cone, &species, &laser, &origin, 1), Err(Error::Node(_))));
    }

    #[test]
    fn collinear_oam_eigenvalue() {
        let (cone, species, laser) = fig3("H", 4.0);
        let laser = collinear(&laser);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..32 {
            let pt = SpacetimePoint::from_xi(&cone, rng.gen_range(0.5..14.0), rng.gen_range(0.0..6.3), 0.0, fs(rng.gen_range(1.0..100.0))).unwrap();
            match oam_apply_collinear(&cone, &species, &laser, &pt) {
                Ok(l) => {
                    for v in l {
                        assert!((v - 2.0).norm() < 1e-8, "{v}");
                    }
                }
                Err(Error::Node(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn mode_oam_expectation() {
        let (cone, species, laser) = fig3("K", 4.0);
        let t = fs(20.0);
        let grid = OamGrid { radial: 120, angular: 16 };
        let full = oam_expectation_mode(&cone, &species, &laser, t, 4, 20.0, grid, OamOperator::Full).unwrap();
        let lead = oam_expectation_mode(&cone, &species, &laser, t, 4, 20.0, grid, OamOperator::Leading).unwrap();
        assert!((full - 2.0).abs() < 1e-6, "{full}");
        assert!((full - lead).abs() < 1e-9);
        let cone0 = BeamCone { ell: 0, ..cone };
        let zero = oam_expectation_mode(&cone0, &species, &laser, t, 1, 20.0, grid, OamOperator::Full).unwrap();
        assert!(zero.abs() < 1e-9);
        assert!(oam_expectation_mode(&cone, &species, &laser, t, 1, 10.0, grid, OamOperator::Full).is_err());
    }
}

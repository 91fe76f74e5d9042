//! Two-level dynamics parameterised by the laser phase ζ.
//!
//! Amplitudes follow the ansatz `ψ_a = A(ζ) e^{−iαζ}`, `ψ_b = B(ζ) e^{−iβζ}`
//! with the eikonal approximation built in (no second derivatives in ζ).
//! The RWA equations in this frame are
//!
//! ```text
//! A' = (iΩ/2) e^{−iφ_d} e^{ i(α−β+1)ζ} B
//! B' = (iΩ/2) e^{ iφ_d} e^{−i(α−β+1)ζ} A
//! ```
//!
//! and the counter-rotating system replaces the factor ½e^{±i(α−β+1)ζ} by
//! `cos ζ · e^{±i(α−β)ζ}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{DormandPrince, Tolerance};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Energies and Rabi frequency divided by the Doppler-shifted drive
/// frequency `v·k − ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedQuantities {
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
    pub denominator: f64,
}

impl ReducedQuantities {
    /// `denominator` is `v·k − ω` (ħ = 1).
    pub fn new(e_a: f64, e_b: f64, rabi: f64, denominator: f64) -> Result<Self> {
        if denominator == 0.0 || !denominator.is_finite() {
            return Err(Error::DegenerateDoppler(denominator));
        }
        Ok(Self {
            alpha: e_a / denominator,
            beta: e_b / denominator,
            omega: rabi / denominator,
            denominator,
        })
    }

    /// `α − β + 1`, which vanishes on resonance.
    pub fn detuning(&self) -> f64 {
        self.alpha - self.beta + 1.0
    }

    pub fn rwa_parameters(&self, dipole_phase: f64) -> RwaParameters {
        let d = self.detuning();
        let delta = d.hypot(self.omega);
        RwaParameters {
            mu1: Complex64::new(0.0, 0.5 * (d + delta)),
            mu2: Complex64::new(0.0, 0.5 * (d - delta)),
            delta,
            dipole_phase,
        }
    }
}

/// Collinear geometry: laser along the beam axis, Doppler term `k v∥`.
pub fn reduced_collinear(
    e_a: f64,
    e_b: f64,
    rabi_x: f64,
    k: f64,
    v_par: f64,
    omega: f64,
) -> Result<ReducedQuantities> {
    ReducedQuantities::new(e_a, e_b, rabi_x, k * v_par - omega)
}

/// Crossed geometry: laser in the transverse plane at angle `phi_laser`,
/// atom moving with transverse speed `v_perp` at azimuth `phi`.
#[allow(clippy::too_many_arguments)]
pub fn reduced_crossed(
    e_a: f64,
    e_b: f64,
    rabi_z: f64,
    k: f64,
    v_perp: f64,
    phi_laser: f64,
    phi: f64,
    omega: f64,
) -> Result<ReducedQuantities> {
    ReducedQuantities::new(e_a, e_b, rabi_z, k * v_perp * (phi_laser - phi).cos() - omega)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelAmplitudes {
    pub a: Complex64,
    pub b: Complex64,
}

impl TwoLevelAmplitudes {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    pub fn upper() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    /// Distance `|Δa| + |Δb|`.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.a - other.a).norm() + (self.b - other.b).norm()
    }

    /// Undo the `e^{−iαζ}`, `e^{−iβζ}` factoring: (A, B) → (ψ_a, ψ_b).
    pub fn to_level_amplitudes(&self, rq: &ReducedQuantities, zeta: f64) -> Self {
        Self::new(
            self.a * Complex64::from_polar(1.0, -rq.alpha * zeta),
            self.b * Complex64::from_polar(1.0, -rq.beta * zeta),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwaParameters {
    pub mu1: Complex64,
    pub mu2: Complex64,
    pub delta: f64,
    pub dipole_phase: f64,
}

fn check_unit_norm(a0: Complex64, b0: Complex64) {
    let n = a0.norm_sqr() + b0.norm_sqr();
    if (n - 1.0).abs() > 1e-9 {
        log::warn!("initial amplitudes are not normalised: |A0|² + |B0|² = {n}");
    }
}

/// General RWA solution for arbitrary initial data at ζ = 0.
pub fn rwa_general_amplitudes(
    a0: Complex64,
    b0: Complex64,
    zeta: f64,
    rq: &ReducedQuantities,
    dipole_phase: f64,
) -> TwoLevelAmplitudes {
    check_unit_norm(a0, b0);
    let p = rq.rwa_parameters(dipole_phase);
    if p.delta == 0.0 {
        return TwoLevelAmplitudes::new(a0, b0);
    }
    let half_coupling = 0.5 * I * rq.omega;
    let ca = half_coupling * Complex64::from_polar(1.0, -dipole_phase) * b0;
    let cb = half_coupling * Complex64::from_polar(1.0, dipole_phase) * a0;
    let e1 = (p.mu1 * zeta).exp();
    let e2 = (p.mu2 * zeta).exp();
    let inv = 1.0 / (p.mu1 - p.mu2);
    let a = (-(a0 * p.mu2 - ca) * e1 + (a0 * p.mu1 - ca) * e2) * inv;
    let b = ((b0 * p.mu1 + cb) / e2 - (b0 * p.mu2 + cb) / e1) * inv;
    TwoLevelAmplitudes::new(a, b)
}

/// Resonant solution starting in the upper level.
pub fn resonant_amplitudes(zeta: f64, omega: f64, dipole_phase: f64) -> TwoLevelAmplitudes {
    let (s, c) = (0.5 * omega * zeta).sin_cos();
    TwoLevelAmplitudes::new(
        Complex64::new(c, 0.0),
        I * Complex64::from_polar(s, dipole_phase),
    )
}

/// Atom at rest with the spatial part of the laser phase dropped
/// (ζ → −ωt). Returns the frame amplitudes (A, B).
#[allow(clippy::too_many_arguments)]
pub fn rest_atom_amplitudes(
    t: f64,
    e_a: f64,
    e_b: f64,
    omega: f64,
    rabi: f64,
    dipole_phase: f64,
    a0: Complex64,
    b0: Complex64,
) -> TwoLevelAmplitudes {
    let lambda1 = e_a - e_b - omega;
    let lambda2 = lambda1.hypot(rabi);
    if lambda2 == 0.0 {
        return TwoLevelAmplitudes::new(a0, b0);
    }
    let (s, c) = (0.5 * lambda2 * t).sin_cos();
    let ratio = lambda1 / lambda2;
    let coupling = I * (rabi / lambda2) * s;
    let a = (a0 * Complex64::new(c, -ratio * s) + coupling * Complex64::from_polar(1.0, -dipole_phase) * b0)
        * Complex64::from_polar(1.0, 0.5 * lambda1 * t);
    let b = (b0 * Complex64::new(c, ratio * s) + coupling * Complex64::from_polar(1.0, dipole_phase) * a0)
        * Complex64::from_polar(1.0, -0.5 * lambda1 * t);
    TwoLevelAmplitudes::new(a, b)
}

/// `|α − β + 1| ≤ tol`.
pub fn is_resonant(rq: &ReducedQuantities, tol: f64) -> bool {
    rq.detuning().abs() <= tol
}

fn check_tol(tol: f64) -> Result<()> {
    if (1e-12..=1e-6).contains(&tol) {
        Ok(())
    } else {
        Err(Error::Domain(format!("ODE tolerance {tol:e} outside [1e-12, 1e-6]")))
    }
}

/// Which right-hand side an ODE reference integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// Rotating-wave system.
    Rotating,
    /// Full `cos ζ` coupling with counter-rotating terms.
    Full,
}

fn rhs(
    coupling: Coupling,
    rq: ReducedQuantities,
    dipole_phase: f64,
) -> impl Fn(f64, &[Complex64; 2]) -> [Complex64; 2] {
    let down = Complex64::from_polar(1.0, -dipole_phase);
    let up = Complex64::from_polar(1.0, dipole_phase);
    move |zeta, y| {
        let (gain, phase) = match coupling {
            Coupling::Rotating => (0.5 * rq.omega, rq.detuning() * zeta),
            Coupling::Full => (rq.omega * zeta.cos(), (rq.alpha - rq.beta) * zeta),
        };
        let w = Complex64::from_polar(1.0, phase);
        [I * gain * down * w * y[1], I * gain * up * w.conj() * y[0]]
    }
}

// Global error of an embedded pair runs a little above the local target;
// this factor keeps the end-point error within the requested tolerance.
const LOCAL_TOL_FACTOR: f64 = 0.05;

/// Integrates (A, B) from ζ = 0 and reports them at each requested ζ,
/// in order.
#[allow(clippy::too_many_arguments)]
pub fn ode_trajectory(
    coupling: Coupling,
    a0: Complex64,
    b0: Complex64,
    samples: &[f64],
    rq: &ReducedQuantities,
    dipole_phase: f64,
    tol: f64,
) -> Result<Vec<TwoLevelAmplitudes>> {
    check_tol(tol)?;
    let mut stepper = DormandPrince::new(
        rhs(coupling, *rq, dipole_phase),
        Tolerance::uniform(tol * LOCAL_TOL_FACTOR),
    );
    let mut x = 0.0;
    let mut y = [a0, b0];
    let mut out = Vec::with_capacity(samples.len());
    for &target in samples {
        y = stepper.advance(x, y, target)?;
        x = target;
        out.push(TwoLevelAmplitudes::new(y[0], y[1]));
    }
    Ok(out)
}

/// Adaptive integration of the rotating-wave system to `zeta_end`.
pub fn ode_reference_rwa(
    a0: Complex64,
    b0: Complex64,
    zeta_end: f64,
    rq: &ReducedQuantities,
    dipole_phase: f64,
    tol: f64,
) -> Result<TwoLevelAmplitudes> {
    ode_trajectory(Coupling::Rotating, a0, b0, &[zeta_end], rq, dipole_phase, tol).map(|v| v[0])
}

/// Adaptive integration of the full `cos ζ` system to `zeta_end`.
pub fn ode_reference_full(
    a0: Complex64,
    b0: Complex64,
    zeta_end: f64,
    rq: &ReducedQuantities,
    dipole_phase: f64,
    tol: f64,
) -> Result<TwoLevelAmplitudes> {
    ode_trajectory(Coupling::Full, a0, b0, &[zeta_end], rq, dipole_phase, tol).map(|v| v[0])
}

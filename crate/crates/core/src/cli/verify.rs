//! Self-check suite run by the `verify` command.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;

use crate::atoms::{self, LaserField, Scenario, Species};
use crate::beams::{self, BeamCone, PhaseForm, SpacetimePoint};
use crate::error::{Error, Result};
use crate::oracles::{self, QuadratureSpec};
use crate::specfun::{bessel_j, bessel_j_series_oracle};
use crate::twolevel::{self, ReducedQuantities};
use crate::units::{self, Unit};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub max_error: f64,
    pub threshold: f64,
    pub seconds: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_error < self.threshold
    }

    pub fn status(&self) -> &'static str {
        if self.passed() {
            "pass"
        } else {
            "fail"
        }
    }
}

/// Low-discrepancy points in `[0, 1)^D` (additive recurrence with the
/// generalised golden ratio), so the suite needs no random state.
struct Weyl<const D: usize> {
    alpha: [f64; D],
    state: [f64; D],
}

impl<const D: usize> Weyl<D> {
    fn new() -> Self {
        // root of x^(D+1) = x + 1
        let mut g = 2.0f64;
        for _ in 0..64 {
            g = (1.0 + g).powf(1.0 / (D as f64 + 1.0));
        }
        let alpha = std::array::from_fn(|i| (1.0 / g.powi(i as i32 + 1)).fract());
        Self { alpha, state: [0.5; D] }
    }

    fn next(&mut self) -> [f64; D] {
        for (s, a) in self.state.iter_mut().zip(self.alpha) {
            *s = (*s + a).fract();
        }
        self.state
    }
}

fn fs(t: f64) -> f64 {
    units::to_atomic(t, Unit::Femtosecond)
}

fn fig3(name: &str, field_gv: f64, scenario: Scenario) -> Result<(BeamCone, Species, LaserField)> {
    let species = Species::builtin(name)?;
    let v = if name == "H" { 1.4e6 } else { 0.7e6 };
    let cone = BeamCone::from_transverse_velocity(units::to_atomic(v, Unit::CmPerS), 0.2, 2, species.mass)?;
    let laser = LaserField::new(
        units::to_atomic(field_gv, Unit::GvPerCm),
        species.transition_energy,
        scenario,
        0.5 * PI,
    )?;
    Ok((cone, species, laser))
}

fn free_quadrature() -> Result<f64> {
    let spec = QuadratureSpec::default();
    let mut w = Weyl::<4>::new();
    let mut worst: f64 = 0.0;
    for ell in [0, 1, -1, 2, -2, 5] {
        let cone = BeamCone::new(50.0, 0.2, ell, 1837.0)?;
        for _ in 0..32 {
            let [u0, u1, u2, u3] = w.next();
            let pt = SpacetimePoint::from_xi(&cone, 20.0 * u0, 2.0 * PI * u1, 100.0 * u2 - 50.0, 500.0 * u3)?;
            let q = oracles::quad_free_twisted(&cone, &pt, &spec)?;
            worst = worst.max((q - beams::free_twisted_state(&cone, &pt)).norm());
        }
    }
    Ok(worst)
}

fn crossed_quadrature() -> Result<f64> {
    let spec = QuadratureSpec::default();
    let mut w = Weyl::<4>::new();
    let mut worst: f64 = 0.0;
    for name in ["H", "K"] {
        let (cone, species, laser) = fig3(name, 4.0, Scenario::Crossed)?;
        for _ in 0..32 {
            let [u0, u1, u2, u3] = w.next();
            let pt = SpacetimePoint::from_xi(&cone, 15.0 * u0, 2.0 * PI * u1, 100.0 * u2 - 50.0, fs(100.0 * u3))?;
            let q = oracles::quad_twisted_crossed_expanded(&cone, &species, &laser, &pt, &spec)?;
            let c = beams::twisted_crossed(&cone, &species, &laser, &pt, PhaseForm::Exact)?;
            worst = worst.max(q.amplitudes().distance(&c.amplitudes()));
        }
    }
    Ok(worst)
}

fn rwa_ode(tol: f64) -> Result<f64> {
    let mut w = Weyl::<8>::new();
    let mut worst: f64 = 0.0;
    for i in 0..64 {
        let u = w.next();
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let rq = ReducedQuantities::new(4.0 * u[0] - 2.0, 4.0 * u[1] - 2.0, 4.0 * u[2] - 2.0, sign * (0.5 + u[3]))?;
        let a0 = Complex64::new(2.0 * u[4] - 1.0, 2.0 * u[5] - 1.0);
        let b0 = Complex64::new(u[6] - 0.5, 0.3);
        let n = (a0.norm_sqr() + b0.norm_sqr()).sqrt();
        let (a0, b0) = (a0 / n, b0 / n);
        let phi = 2.0 * PI * u[7];
        let zeta = 60.0 * u[0] * u[1] - 30.0 * u[2];
        let closed = twolevel::rwa_general_amplitudes(a0, b0, zeta, &rq, phi);
        let ode = twolevel::ode_reference_rwa(a0, b0, zeta, &rq, phi, tol)?;
        worst = worst.max(closed.distance(&ode));
    }
    Ok(worst)
}

fn conservation() -> Result<f64> {
    let mut w = Weyl::<6>::new();
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let u = w.next();
        let name = ["H", "Li", "Na", "K"][i % 4];
        let scenario = if i % 2 == 0 { Scenario::Crossed } else { Scenario::Collinear };
        let (cone, species, laser) = fig3(name, 8.0 * u[0], scenario)?;
        let p = [cone.p0 * (u[1] - 0.5), cone.p0 * (u[2] - 0.5), cone.p_par()];
        let pt = SpacetimePoint::new(10.0 * u[3], 2.0 * PI * u[4], 0.0, fs(100.0 * u[5]))?;
        match beams::driven_plane_wave(&species, &laser, p, &pt) {
            Ok(s) => worst = worst.max((s.norm_sqr() - 1.0).abs()),
            Err(Error::DegenerateDoppler(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(worst)
}

fn laser_off() -> Result<f64> {
    let mut w = Weyl::<4>::new();
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let u = w.next();
        let name = ["H", "Li", "Na", "K"][i % 4];
        let scenario = if i % 2 == 0 { Scenario::Crossed } else { Scenario::Collinear };
        let (cone, species, laser) = fig3(name, 0.0, scenario)?;
        let pt = SpacetimePoint::from_xi(&cone, 15.0 * u[0], 2.0 * PI * u[1], 100.0 * u[2] - 50.0, fs(100.0 * u[3]))?;
        let free = beams::free_twisted_state(&cone, &pt);
        let state = match scenario {
            Scenario::Crossed => beams::twisted_crossed(&cone, &species, &laser, &pt, PhaseForm::Approx)?,
            Scenario::Collinear => beams::twisted_collinear(&cone, &species, &laser, &pt)?,
        };
        let amp = state.amplitudes();
        worst = worst.max((amp.a - free).norm()).max(amp.b.norm());
    }
    Ok(worst)
}

fn collinear_invariance() -> Result<f64> {
    let (cone, _, _) = fig3("Na", 4.0, Scenario::Collinear)?;
    let mut w = Weyl::<2>::new();
    let mut worst: f64 = 0.0;
    for xi in [0.7, 3.0, 5.0, 11.2] {
        let values: Vec<f64> = (0..100)
            .map(|_| {
                let [u0, u1] = w.next();
                let pt = SpacetimePoint::from_xi(&cone, xi, 0.4, 200.0 * u0 - 100.0, fs(100.0 * u1))?;
                Ok(crate::profiles::density_collinear(&cone, &pt))
            })
            .collect::<Result<_>>()?;
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
        worst = worst.max(var);
    }
    Ok(worst)
}

fn oam_local() -> Result<f64> {
    let (cone, species, laser) = fig3("Na", 4.0, Scenario::Crossed)?;
    let mut w = Weyl::<3>::new();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < 32 {
        let [u0, u1, u2] = w.next();
        let pt = SpacetimePoint::from_xi(&cone, 0.5 + 13.5 * u0, 2.0 * PI * u1, 0.0, fs(100.0 * u2))?;
        let mut all = Vec::with_capacity(4);
        for n in 1..=4 {
            match beams::oam_apply_mode(&cone, &species, &laser, &pt, n) {
                Ok(l) => all.push((l - cone.ell as f64).norm()),
                Err(Error::Node(_)) => {}
                Err(e) => return Err(e),
            }
        }
        if all.len() == 4 {
            checked += 1;
            worst = all.into_iter().fold(worst, f64::max);
        }
    }
    Ok(worst)
}

fn oam_expectation() -> Result<f64> {
    let (cone, species, laser) = fig3("K", 4.0, Scenario::Crossed)?;
    let grid = beams::OamGrid { radial: 160, angular: 16 };
    let mut worst: f64 = 0.0;
    for n in 1..=4 {
        let l = beams::oam_expectation_mode(&cone, &species, &laser, fs(20.0), n, 40.0, grid, beams::OamOperator::Full)?;
        worst = worst.max((l - cone.ell as f64).abs());
    }
    Ok(worst)
}

fn bessel_series() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for order in 0..=20 {
        for i in 0..=476 {
            let x = 40.0 * i as f64 / 476.0;
            let a = bessel_j(order, x)?;
            let b = bessel_j_series_oracle(order, x, 1e-17)?;
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

fn bessel_recurrence() -> Result<f64> {
    let mut w = Weyl::<2>::new();
    let mut worst: f64 = 0.0;
    for _ in 0..2000 {
        let [u0, u1] = w.next();
        let n = 1 + (u0 * 40.0) as i32;
        let x = 0.05 + 100.0 * u1;
        let r = bessel_j(n - 1, x)? + bessel_j(n + 1, x)? - 2.0 * n as f64 / x * bessel_j(n, x)?;
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

fn hydrogen() -> Result<f64> {
    let field = units::to_atomic(4.0, Unit::GvPerCm);
    let (omega, rx, rz) = atoms::hydrogen_2p1s(field)?;
    let expected = 128.0 / 243.0 * (4e9 / 5.142_206_75e9);
    let rel = ((rx - expected) / expected).abs();
    let exact = (omega - 0.375).abs() + (rz / rx - std::f64::consts::SQRT_2).abs();
    Ok(rel.max(exact))
}

/// Runs every check; `tol` is the ODE tolerance of the two-level reference.
pub fn run(tol: f64) -> Result<Vec<Check>> {
    type Job = (&'static str, f64, Box<dyn Fn() -> Result<f64>>);
    let jobs: Vec<Job> = vec![
        ("free_state_quadrature", 1e-9, Box::new(free_quadrature)),
        ("crossed_state_quadrature", 1e-9, Box::new(crossed_quadrature)),
        ("rwa_closed_form_vs_ode", 10.0 * tol, Box::new(move || rwa_ode(tol))),
        ("probability_conservation", 1e-12, Box::new(conservation)),
        ("laser_off_reduction", 1e-12, Box::new(laser_off)),
        ("collinear_density_variance", 1e-24, Box::new(collinear_invariance)),
        ("oam_eigenvalue", 1e-8, Box::new(oam_local)),
        ("oam_expectation", 1e-6, Box::new(oam_expectation)),
        ("bessel_vs_series", 1e-12, Box::new(bessel_series)),
        ("bessel_recurrence", 1e-10, Box::new(bessel_recurrence)),
        ("hydrogen_parameters", 1e-6, Box::new(hydrogen)),
    ];
    jobs.into_iter()
        .map(|(name, threshold, job)| {
            let start = Instant::now();
            let max_error = job()?;
            let seconds = start.elapsed().as_secs_f64();
            log::info!("{name}: max error {max_error:e} (threshold {threshold:e}, {seconds:.2} s)");
            Ok(Check {
                name,
                max_error,
                threshold,
                seconds,
            })
        })
        .collect()
}

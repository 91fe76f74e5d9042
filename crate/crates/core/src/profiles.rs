//! Probability densities and the beam-profile scans built on them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::atoms::{LaserField, Polarization, Scenario, Species};
use crate::beams::{self, BeamCone, PhaseForm, SpacetimePoint};
use crate::error::{Error, Result};
use crate::specfun::jn;
use crate::twolevel;

/// Crossed-beam density split into the Bessel part `ϱ_ℓ` and the
/// interference part `Δ_ℓ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityBreakdown {
    pub total: f64,
    pub bessel: f64,
    pub delta: f64,
    /// `J_ℓ(Ξₙ)`.
    pub modes: [f64; 4],
}

/// `J_ℓ²(ξ)`; the collinear density depends on nothing else.
pub fn density_collinear(cone: &BeamCone, pt: &SpacetimePoint) -> f64 {
    jn(cone.ell, pt.xi(cone)).powi(2)
}

/// `ϱ_ℓ = ¼ Σ J_ℓ²(Ξₙ)` and
/// `Δ_ℓ = ½cos(θ + ℓ(Φ₂−Φ₁))J₁J₂ − ½cos(θ + ℓ(Φ₄−Φ₃))J₃J₄`
/// with `θ = (Ω_Rz/ω)ζ`.
pub fn density_crossed(
    cone: &BeamCone,
    species: &Species,
    laser: &LaserField,
    pt: &SpacetimePoint,
    form: PhaseForm,
) -> Result<DensityBreakdown> {
    let mc = beams::mode_coordinates(cone, species, laser, pt, form)?;
    let ell = cone.ell as f64;
    let j = mc.modes.map(|m| jn(cone.ell, m.radius));
    let bessel = 0.25 * j.iter().map(|v| v * v).sum::<f64>();
    let theta = species.dipole(Polarization::Z).0 * laser.amplitude / laser.omega * mc.zeta;
    let phase = |p: usize, q: usize| (theta + ell * (mc.modes[q].angle - mc.modes[p].angle)).cos();
    let delta = 0.5 * phase(0, 1) * j[0] * j[1] - 0.5 * phase(2, 3) * j[2] * j[3];
    Ok(DensityBreakdown {
        total: bessel + delta,
        bessel,
        delta,
        modes: j,
    })
}

/// Beam, atom, laser and phase form shared by every sample of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub cone: BeamCone,
    pub species: Species,
    pub laser: LaserField,
    pub form: PhaseForm,
}

impl Scene {
    /// Density at `(ξ, φ)` on the plane `z = 0`.
    pub fn density(&self, xi: f64, phi: f64, t: f64) -> Result<DensityBreakdown> {
        let pt = SpacetimePoint::from_xi(&self.cone, xi, phi, 0.0, t)?;
        match self.laser.scenario {
            Scenario::Collinear => {
                let j = jn(self.cone.ell, pt.xi(&self.cone));
                Ok(DensityBreakdown {
                    total: j * j,
                    bessel: j * j,
                    delta: 0.0,
                    modes: [j; 4],
                })
            }
            Scenario::Crossed => density_crossed(&self.cone, &self.species, &self.laser, &pt, self.form),
        }
    }

    /// Physics parameters echoed into every scan, atomic units.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let s = &self.species;
        let c = &self.cone;
        let l = &self.laser;
        let (rabi, dipole_phase) = beams::coupling(s, l);
        vec![
            ("species".to_string(), s.name.clone()),
            ("species_Z".to_string(), s.z.to_string()),
            ("mass_au".to_string(), fmt(s.mass)),
            ("transition_energy_au".to_string(), fmt(s.transition_energy)),
            ("dipole_x_au".to_string(), fmt(s.dipole_x)),
            ("dipole_z_au".to_string(), fmt(s.dipole_z)),
            ("dipole_phase_rad".to_string(), fmt(dipole_phase)),
            ("ell".to_string(), c.ell.to_string()),
            ("p0_au".to_string(), fmt(c.p0)),
            ("theta0_rad".to_string(), fmt(c.theta0)),
            ("p_perp0_au".to_string(), fmt(c.p_perp())),
            ("v_perp0_au".to_string(), fmt(c.v_perp())),
            ("field_au".to_string(), fmt(l.amplitude)),
            ("omega_au".to_string(), fmt(l.omega)),
            ("k_au".to_string(), fmt(l.k())),
            ("rabi_au".to_string(), fmt(rabi)),
            ("scenario".to_string(), l.scenario.to_string()),
            ("phi_laser_rad".to_string(), fmt(l.phi_laser)),
            ("phase_form".to_string(), self.form.to_string()),
        ]
    }
}

fn fmt(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanKind {
    Radial,
    Azimuthal,
    Grid,
    Delta,
    Rabi,
}

impl ScanKind {
    pub fn name(self) -> &'static str {
        match self {
            ScanKind::Radial => "radial",
            ScanKind::Azimuthal => "azimuthal",
            ScanKind::Grid => "grid",
            ScanKind::Delta => "delta",
            ScanKind::Rabi => "rabi",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub end: f64,
    pub samples: usize,
}

/// Sampled profile: one row per grid point, columns named in `columns`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridScan {
    pub kind: ScanKind,
    pub axes: Vec<Axis>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Vec<(String, String)>,
}

impl GridScan {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

fn check_samples(n: usize) -> Result<()> {
    if n >= 2 {
        Ok(())
    } else {
        Err(Error::Domain(format!("a scan needs at least 2 samples, got {n}")))
    }
}

fn check_range(range: (f64, f64)) -> Result<()> {
    if range.0.is_finite() && range.1.is_finite() && range.0 >= 0.0 && range.1 > range.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "ξ range must satisfy 0 ≤ start < end, got [{}, {}]",
            range.0, range.1
        )))
    }
}

/// Uniform grid including both end points.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    let step = (end - start) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { end } else { start + i as f64 * step })
        .collect()
}

fn evaluate<T, F>(points: &[T], f: F) -> Result<Vec<Vec<f64>>>
where
    T: Sync,
    F: Fn(&T) -> Result<Vec<f64>> + Sync + Send,
{
    points.par_iter().map(f).collect()
}

fn scan_metadata(scene: &Scene, extra: &[(&str, f64)]) -> Vec<(String, String)> {
    let mut m = scene.metadata();
    m.extend(extra.iter().map(|(k, v)| (k.to_string(), fmt(*v))));
    m
}

fn names(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

/// Density along `ξ` at fixed azimuth and time.
pub fn radial_scan(scene: &Scene, phi: f64, t: f64, range: (f64, f64), samples: usize) -> Result<GridScan> {
    check_samples(samples)?;
    check_range(range)?;
    let xs = linspace(range.0, range.1, samples);
    let rows = evaluate(&xs, |&xi| {
        let d = scene.density(xi, phi, t)?;
        Ok(vec![xi, d.total, d.bessel, d.delta])
    })?;
    Ok(GridScan {
        kind: ScanKind::Radial,
        axes: vec![Axis {
            name: "xi".into(),
            start: range.0,
            end: range.1,
            samples,
        }],
        columns: names(&["xi", "rho_total", "rho_bessel", "delta"]),
        rows,
        metadata: scan_metadata(scene, &[("phi_rad", phi), ("t_au", t)]),
    })
}

/// Density along `φ ∈ [0, 2π)` at fixed `ξ` and time.
pub fn azimuthal_scan(scene: &Scene, xi: f64, t: f64, samples: usize) -> Result<GridScan> {
    check_samples(samples)?;
    let phis: Vec<f64> = (0..samples).map(|i| 2.0 * PI * i as f64 / samples as f64).collect();
    let rows = evaluate(&phis, |&phi| {
        let d = scene.density(xi, phi, t)?;
        Ok(vec![phi, d.total, d.bessel, d.delta])
    })?;
    Ok(GridScan {
        kind: ScanKind::Azimuthal,
        axes: vec![Axis {
            name: "phi".into(),
            start: 0.0,
            end: 2.0 * PI,
            samples,
        }],
        columns: names(&["phi", "rho_total", "rho_bessel", "delta"]),
        rows,
        metadata: scan_metadata(scene, &[("xi", xi), ("t_au", t)]),
    })
}

/// Total density on the square `[−extent, extent]²` in `ξ` units; `y`
/// is the slow index.
pub fn grid_snapshot(scene: &Scene, t: f64, extent: f64, nx: usize, ny: usize) -> Result<GridScan> {
    check_samples(nx)?;
    check_samples(ny)?;
    if !(extent > 0.0 && extent.is_finite()) {
        return Err(Error::Domain(format!("grid extent must be positive, got {extent}")));
    }
    let xs = linspace(-extent, extent, nx);
    let ys = linspace(-extent, extent, ny);
    let points: Vec<(f64, f64)> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect();
    let rows = evaluate(&points, |&(x, y)| {
        let d = scene.density(x.hypot(y), y.atan2(x), t)?;
        Ok(vec![x, y, d.total, d.bessel])
    })?;
    Ok(GridScan {
        kind: ScanKind::Grid,
        axes: vec![
            Axis {
                name: "x".into(),
                start: -extent,
                end: extent,
                samples: nx,
            },
            Axis {
                name: "y".into(),
                start: -extent,
                end: extent,
                samples: ny,
            },
        ],
        columns: names(&["x", "y", "rho_total", "rho_bessel"]),
        rows,
        metadata: scan_metadata(scene, &[("t_au", t)]),
    })
}

/// Interference part `Δ_ℓ` along `ξ`.
pub fn delta_scan(scene: &Scene, phi: f64, t: f64, range: (f64, f64), samples: usize) -> Result<GridScan> {
    let radial = radial_scan(scene, phi, t, range, samples)?;
    Ok(GridScan {
        kind: ScanKind::Delta,
        columns: names(&["xi", "delta"]),
        rows: radial.rows.iter().map(|r| vec![r[0], r[3]]).collect(),
        ..radial
    })
}

/// How the atom of a Rabi trace moves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RabiMotion<'a> {
    /// Atom at rest; the rest-frame formula applies.
    Rest,
    /// Plane-wave component of `cone` at azimuth `phi`: longitudinal
    /// velocity for a collinear laser, transverse for a crossed one.
    Moving { cone: &'a BeamCone, phi: f64 },
}

/// Level populations of a plane-wave atom switched on in the upper level.
/// A moving atom follows the general RWA solution at `ζ = −ωt`.
pub fn rabi_scan(species: &Species, laser: &LaserField, times: &[f64], motion: RabiMotion) -> Result<GridScan> {
    check_samples(times.len())?;
    let l = laser;
    let (e_a, e_b) = species.level_energies();
    let (rabi, dipole_phase) = beams::coupling(species, l);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let rq = match motion {
        RabiMotion::Rest => None,
        RabiMotion::Moving { cone, phi } => Some(match l.scenario {
            Scenario::Collinear => twolevel::reduced_collinear(e_a, e_b, rabi, l.k(), cone.v_par(), l.omega)?,
            Scenario::Crossed => {
                twolevel::reduced_crossed(e_a, e_b, rabi, l.k(), cone.v_perp(), l.phi_laser, phi, l.omega)?
            }
        }),
    };
    let rows = evaluate(times, |&t| {
        let amp = match &rq {
            None => twolevel::rest_atom_amplitudes(t, e_a, e_b, l.omega, rabi, dipole_phase, one, zero),
            Some(rq) => twolevel::rwa_general_amplitudes(one, zero, -l.omega * t, rq, dipole_phase),
        };
        Ok(vec![t, amp.a.norm_sqr(), amp.b.norm_sqr()])
    })?;
    let mut metadata = vec![
        ("species".to_string(), species.name.clone()),
        ("transition_energy_au".to_string(), fmt(species.transition_energy)),
        ("dipole_phase_rad".to_string(), fmt(dipole_phase)),
        ("field_au".to_string(), fmt(l.amplitude)),
        ("omega_au".to_string(), fmt(l.omega)),
        ("k_au".to_string(), fmt(l.k())),
        ("rabi_au".to_string(), fmt(rabi)),
        ("scenario".to_string(), l.scenario.to_string()),
        ("phi_laser_rad".to_string(), fmt(l.phi_laser)),
        ("rest".to_string(), rq.is_none().to_string()),
    ];
    if let (RabiMotion::Moving { cone, phi }, Some(rq)) = (motion, &rq) {
        metadata.push(("v_par_au".to_string(), fmt(cone.v_par())));
        metadata.push(("v_perp0_au".to_string(), fmt(cone.v_perp())));
        metadata.push(("phi_rad".to_string(), fmt(phi)));
        metadata.push(("detuning_reduced".to_string(), fmt(rq.detuning())));
    }
    Ok(GridScan {
        kind: ScanKind::Rabi,
        axes: vec![Axis {
            name: "t".into(),
            start: times[0],
            end: times[times.len() - 1],
            samples: times.len(),
        }],
        columns: names(&["t", "pop_a", "pop_b"]),
        rows,
        metadata,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub x: f64,
    pub y: f64,
}

/// Interior local maxima of a uniformly sampled curve, refined by the
/// parabola through each maximum and its two neighbours.
pub fn local_maxima(xs: &[f64], ys: &[f64]) -> Vec<Peak> {
    let mut out = Vec::new();
    for i in 1..ys.len().saturating_sub(1) {
        let (a, b, c) = (ys[i - 1], ys[i], ys[i + 1]);
        if b > a && b >= c {
            let curvature = a - 2.0 * b + c;
            let offset = if curvature < 0.0 { 0.5 * (a - c) / curvature } else { 0.0 };
            let h = xs[i + 1] - xs[i];
            out.push(Peak {
                x: xs[i] + offset * h,
                y: b - 0.25 * (a - c) * offset,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{self, Unit};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scene(name: &str, field_gv: f64, scenario: Scenario) -> Scene {
        let species = Species::builtin(name).unwrap();
        let v = if name == "H" { 1.4e6 } else { 0.7e6 };
        let cone = BeamCone::from_transverse_velocity(units::to_atomic(v, Unit::CmPerS), 0.2, 2, species.mass).unwrap();
        let laser = LaserField::new(
            units::to_atomic(field_gv, Unit::GvPerCm),
            species.transition_energy,
            scenario,
            0.5 * PI,
        )
        .unwrap();
        Scene {
            cone,
            species,
            laser,
            form: PhaseForm::Approx,
        }
    }

    fn fs(t: f64) -> f64 {
        units::to_atomic(t, Unit::Femtosecond)
    }

    #[test]
    fn collinear_density_examples() {
        let sc = scene("H", 4.0, Scenario::Collinear);
        let origin = SpacetimePoint::new(0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(density_collinear(&sc.cone, &origin), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let pt = SpacetimePoint::from_xi(&sc.cone, rng.gen_range(0.0..15.0), rng.gen_range(0.0..6.3), rng.gen_range(-100.0..100.0), rng.gen_range(0.0..fs(100.0))).unwrap();
            let s = beams::twisted_collinear(&sc.cone, &sc.species, &sc.laser, &pt).unwrap();
            assert!((s.amplitudes().norm_sqr() - density_collinear(&sc.cone, &pt)).abs() < 1e-12);
        }
        let at = |t: f64| density_collinear(&sc.cone, &SpacetimePoint::from_xi(&sc.cone, 4.0, 1.0, 0.0, fs(t)).unwrap());
        assert_eq!(at(0.0), at(10.0));
        assert_eq!(at(0.0), at(20.0));
    }

    #[test]
    fn decomposition_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let scenes: Vec<Scene> = ["H", "Li", "Na", "K"].iter().map(|n| scene(n, 4.0, Scenario::Crossed)).collect();
        for _ in 0..10_000 {
            let sc = &scenes[rng.gen_range(0..4)];
            let form = if rng.gen_bool(0.5) { PhaseForm::Exact } else { PhaseForm::Approx };
            let laser = LaserField {
                amplitude: sc.laser.amplitude * rng.gen_range(0.0..3.0),
                ..sc.laser
            };
            let cone = BeamCone { ell: rng.gen_range(-4..6), ..sc.cone };
            let pt = SpacetimePoint::from_xi(&cone, rng.gen_range(0.0..15.0), rng.gen_range(0.0..6.3), 0.0, fs(rng.gen_range(0.0..100.0))).unwrap();
            let d = density_crossed(&cone, &sc.species, &laser, &pt, form).unwrap();
            let psi = beams::twisted_crossed(&cone, &sc.species, &laser, &pt, form).unwrap();
            assert!((d.total - d.bessel - d.delta).abs() < 1e-12);
            assert!((d.total - psi.amplitudes().norm_sqr()).abs() < 1e-12);
            assert!(d.bessel >= 0.0);
            assert!(d.total >= -1e-14);
        }
    }

    #[test]
    fn crossed_reductions() {
        let off = scene("K", 0.0, Scenario::Crossed);
        let on = scene("K", 4.0, Scenario::Crossed);
        for xi in [0.0, 1.0, 3.054, 7.5] {
            let j2 = jn(2, xi).powi(2);
            let d = off.density(xi, 0.7, fs(20.0)).unwrap();
            assert!((d.total - j2).abs() < 1e-15 && (d.bessel - j2).abs() < 1e-15);
            assert_eq!(d.delta, 0.0);
            let d = on.density(xi, 0.7, 0.0).unwrap();
            assert!((d.total - j2).abs() < 1e-15);
        }
    }

    #[test]
    fn free_profile_peak() {
        let sc = scene("H", 0.0, Scenario::Crossed);
        let scan = radial_scan(&sc, PI / 3.0, 0.0, (0.0, 15.0), 512).unwrap();
        let peaks = local_maxima(&scan.column("xi").unwrap(), &scan.column("rho_total").unwrap());
        assert!((peaks[0].x - 3.054).abs() < 1e-3, "{:?}", peaks[0]);
        assert!((peaks[0].y - 0.2366).abs() < 1e-4);
        assert_eq!(scan.rows.len(), 512);
        assert_eq!(scan.rows[511][0], 15.0);
    }

    #[test]
    fn hydrogen_t0_matches_free() {
        let sc = scene("H", 4.0, Scenario::Crossed);
        let scan = radial_scan(&sc, PI / 3.0, 0.0, (0.0, 15.0), 101).unwrap();
        for r in &scan.rows {
            let pt = SpacetimePoint::from_xi(&sc.cone, r[0], 0.0, 0.0, 0.0).unwrap();
            assert!((r[1] - jn(2, pt.xi(&sc.cone)).powi(2)).abs() < 1e-15);
        }
    }

    #[test]
    fn delta_is_small_for_hydrogen() {
        let sc = scene("H", 4.0, Scenario::Crossed);
        for t in [10.0, 15.0, 20.0] {
            let scan = radial_scan(&sc, PI / 3.0, fs(t), (0.0, 15.0), 512).unwrap();
            let max_rho = scan.column("rho_bessel").unwrap().into_iter().fold(0.0, f64::max);
            let max_delta = scan.column("delta").unwrap().into_iter().fold(0.0, |m: f64, v| m.max(v.abs()));
            assert!(max_delta < 1e-2 * max_rho, "t = {t}: {max_delta} vs {max_rho}");
        }
        let off = scene("H", 0.0, Scenario::Crossed);
        let d = delta_scan(&off, PI / 3.0, fs(20.0), (0.0, 15.0), 64).unwrap();
        assert!(d.rows.iter().all(|r| r[1] == 0.0));
        assert_eq!(d.columns, ["xi", "delta"]);
    }

    #[test]
    fn dipole_phase_does_not_change_density() {
        let sc = scene("Na", 4.0, Scenario::Crossed);
        let mut record = sc.species.record().clone();
        record.phase_z_rad = 1.234;
        let shifted = Scene {
            species: Species::from_record(record).unwrap(),
            ..sc.clone()
        };
        for xi in [0.5, 2.0, 6.0, 11.0] {
            let a = sc.density(xi, 0.4, fs(15.0)).unwrap();
            let b = shifted.density(xi, 0.4, fs(15.0)).unwrap();
            assert_eq!(a, b);
            let pt = SpacetimePoint::from_xi(&sc.cone, xi, 0.4, 0.0, fs(15.0)).unwrap();
            let psi = beams::twisted_crossed(&shifted.cone, &shifted.species, &shifted.laser, &pt, PhaseForm::Approx).unwrap();
            assert!((psi.norm_sqr() - b.total).abs() < 1e-14);
        }
    }

    #[test]
    fn azimuthal_symmetry() {
        let off = scene("Li", 0.0, Scenario::Crossed);
        let scan = azimuthal_scan(&off, 5.0, fs(20.0), 64).unwrap();
        let first = scan.rows[0][1];
        assert!(scan.rows.iter().all(|r| r[1] == first));
        let node = crate::specfun::jn(2, 5.135_622_301_840_683);
        let scan = azimuthal_scan(&off, 5.135_622_301_840_683, 0.0, 16).unwrap();
        assert!(scan.rows.iter().all(|r| r[1] == node * node && r[1] < 1e-30));

        let on = scene("K", 4.0, Scenario::Crossed);
        let pl = on.laser.phi_laser;
        for dphi in [0.1, 0.7, 1.3, 2.9] {
            for xi in [3.0, 5.0] {
                let a = on.density(xi, pl + dphi, fs(20.0)).unwrap();
                let b = on.density(xi, pl - dphi, fs(20.0)).unwrap();
                assert!((a.bessel - b.bessel).abs() < 1e-10);
                // Δ flips the sign of ℓ(Φ₂−Φ₁) under the reflection
                assert!((a.total - b.total).abs() <= a.delta.abs() + b.delta.abs() + 1e-12);
            }
        }
    }

    #[test]
    fn grid_snapshot_properties() {
        let on = scene("K", 4.0, Scenario::Crossed);
        let g = grid_snapshot(&on, fs(20.0), 12.0, 21, 17).unwrap();
        assert_eq!(g.rows.len(), 21 * 17);
        assert!((g.rows[1][0] - g.rows[0][0] - 1.2).abs() < 1e-14);
        assert!((g.rows[21][1] - g.rows[0][1] - 1.5).abs() < 1e-14);
        // reflection about the field direction φ_L = π/2 is x → −x
        for r in 0..17 {
            for c in 0..21 {
                let a = &g.rows[r * 21 + c];
                let b = &g.rows[r * 21 + (20 - c)];
                assert!((a[3] - b[3]).abs() < 1e-10);
            }
        }
        // z-independence
        let l = &on.laser;
        for (xi, phi) in [(2.0, 0.3), (6.0, 1.7), (9.5, 4.0)] {
            let p0 = SpacetimePoint::from_xi(&on.cone, xi, phi, 0.0, fs(20.0)).unwrap();
            let p1 = SpacetimePoint { z: 100.0, ..p0 };
            let a = density_crossed(&on.cone, &on.species, l, &p0, PhaseForm::Approx).unwrap();
            let b = density_crossed(&on.cone, &on.species, l, &p1, PhaseForm::Approx).unwrap();
            assert_eq!(a, b);
        }
        let off = scene("K", 0.0, Scenario::Crossed);
        let g = grid_snapshot(&off, fs(20.0), 10.0, 11, 11).unwrap();
        // rings: equal radius, equal value
        assert_eq!(g.rows[0][2], g.rows[10][2]);
        assert_eq!(g.rows[0][2], g.rows[120][2]);
    }

    #[test]
    fn field_strength_continuity() {
        let base = scene("Na", 0.0, Scenario::Crossed);
        let mut last = f64::INFINITY;
        for field in [1e-3, 1e-6, 1e-9] {
            let sc = Scene {
                laser: LaserField { amplitude: field, ..base.laser },
                ..base.clone()
            };
            let mut dev: f64 = 0.0;
            for i in 0..=60 {
                let xi = 0.25 * i as f64;
                let d = sc.density(xi, PI / 3.0, fs(20.0)).unwrap();
                dev = dev.max((d.total - base.density(xi, PI / 3.0, fs(20.0)).unwrap().total).abs());
            }
            assert!(dev < last, "{field}: {dev} !< {last}");
            last = dev;
        }
    }

    #[test]
    fn scan_validation() {
        let sc = scene("H", 4.0, Scenario::Crossed);
        assert!(radial_scan(&sc, 0.0, 0.0, (0.0, 15.0), 1).is_err());
        assert!(radial_scan(&sc, 0.0, 0.0, (5.0, 1.0), 10).is_err());
        assert!(grid_snapshot(&sc, 0.0, -1.0, 4, 4).is_err());
    }

    #[test]
    fn scans_are_deterministic() {
        let sc = scene("K", 4.0, Scenario::Crossed);
        let a = radial_scan(&sc, PI / 3.0, fs(20.0), (0.0, 15.0), 300).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| radial_scan(&sc, PI / 3.0, fs(20.0), (0.0, 15.0), 300).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn rabi_traces() {
        let sc = scene("H", 4.0, Scenario::Collinear);
        let times = linspace(0.0, 200.0, 41);
        let rest = rabi_scan(&sc.species, &sc.laser, &times, RabiMotion::Rest).unwrap();
        let (rabi, _) = beams::coupling(&sc.species, &sc.laser);
        for r in &rest.rows {
            assert!((r[1] - (0.5 * rabi * r[0]).cos().powi(2)).abs() < 1e-12);
            assert!((r[1] + r[2] - 1.0).abs() < 1e-12);
        }
        let moving = rabi_scan(&sc.species, &sc.laser, &times, RabiMotion::Moving { cone: &sc.cone, phi: 0.0 }).unwrap();
        for r in &moving.rows {
            assert!((r[1] + r[2] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn peak_refinement() {
        let xs = linspace(0.0, 4.0, 41);
        let ys: Vec<f64> = xs.iter().map(|x| -(x - 1.234f64).powi(2) + 2.0).collect();
        let p = local_maxima(&xs, &ys);
        assert_eq!(p.len(), 1);
        assert!((p[0].x - 1.234).abs() < 1e-12);
        assert!((p[0].y - 2.0).abs() < 1e-12);
        assert!(local_maxima(&xs[..2], &ys[..2]).is_empty());
    }
}

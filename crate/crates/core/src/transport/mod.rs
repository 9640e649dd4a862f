//! Coherent transmission through a cone-like junction joining two coaxial
//! cylinders, with transmitting (open) boundaries at both ends.
//!
//! Azimuthal channels decouple on an axisymmetric surface, so the surface
//! Schrödinger equation reduces per channel `n` to
//!
//! ```text
//! -(ħ²/2m) (1/w) (p φ')' + [ (ħ²/2m) n²/ρ² + U(z) ] φ = E φ,
//! p = ρ/√(1+ρ'²),  w = ρ√(1+ρ'²)
//! ```
//!
//! on `[-a, a]`. The discretization is the conservative three-point scheme
//! with `p` at half points and the potential averaged over each cell, which
//! keeps the scheme second order even though `U` jumps at the four branch
//! points of the profile. The leads are uniform semi-infinite lattices with
//! the same spacing, so the boundary rows are exact for the discrete problem
//! and the discrete current is conserved to round-off.

mod sweep;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{potential_from_profile, GeometryError, JunctionGeometry};
use crate::linalg::{solve_tridiagonal, LinalgError};
use crate::scalar::Scalar;
use crate::units::{KineticScale, JUNCTION_MASS_RATIO};

pub use sweep::{transmission_vs_energy, transmission_vs_r1, FixedJunctionParams, SweepPoint};

/// Smallest accepted number of interior grid points.
pub const MIN_GRID_POINTS: usize = 500;
/// Default number of interior grid points.
pub const DEFAULT_GRID_POINTS: usize = 4000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransportError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid scattering configuration: {0}")]
    InvalidConfig(String),
    #[error("{grid_points} interior grid points is below the minimum of {minimum}")]
    GridTooCoarse { grid_points: usize, minimum: usize },
    #[error("incoming channel is closed: kinetic energy {kinetic} meV in the injection lead")]
    ClosedIncomingChannel { kinetic: f64 },
    #[error("lead energy {kinetic} meV lies above the lattice band edge; refine the grid")]
    AboveBand { kinetic: f64 },
    #[error("singular scattering system at row {row} (pivot ratio {pivot_ratio:.3e})")]
    Singular { row: usize, pivot_ratio: f64 },
    #[error("{} of {total} sweep points failed; first at index {}: {}", failures.len(), failures[0].0, failures[0].1)]
    Sweep { total: usize, failures: Vec<(usize, String)> },
}

impl From<LinalgError> for TransportError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::Singular { row, pivot_ratio } => TransportError::Singular { row, pivot_ratio },
            other => TransportError::InvalidConfig(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterConfig<T> {
    /// Longitudinal kinetic energy of the injected wave, meV.
    pub energy_l: T,
    /// Effective mass in units of the free electron mass.
    pub mass_ratio: T,
    /// Transverse (azimuthal) mode.
    pub mode_n: u32,
    /// Interior grid points on `[-a, a]`.
    pub grid_points: usize,
    /// Include the geometric potential. Switching it off leaves the bare
    /// kinetic operator on the curved surface.
    pub geometric_potential: bool,
}

impl<T: Scalar> ScatterConfig<T> {
    pub fn new(energy_l: T) -> Self {
        ScatterConfig {
            energy_l,
            mass_ratio: T::lit(JUNCTION_MASS_RATIO),
            mode_n: 0,
            grid_points: DEFAULT_GRID_POINTS,
            geometric_potential: true,
        }
    }

    pub fn with_grid_points(mut self, grid_points: usize) -> Self {
        self.grid_points = grid_points;
        self
    }

    pub fn with_energy(mut self, energy_l: T) -> Self {
        self.energy_l = energy_l;
        self
    }

    pub fn scale(&self) -> KineticScale<T> {
        KineticScale::from_mass_ratio(self.mass_ratio)
    }

    pub fn validate(&self) -> Result<(), TransportError> {
        if !(self.energy_l > T::zero()) || !self.energy_l.is_finite() {
            return Err(TransportError::InvalidConfig(format!("E_l must be positive, got {}", self.energy_l)));
        }
        if !(self.mass_ratio > T::zero()) || !self.mass_ratio.is_finite() {
            return Err(TransportError::InvalidConfig(format!(
                "mass ratio must be positive, got {}",
                self.mass_ratio
            )));
        }
        if self.grid_points < MIN_GRID_POINTS {
            return Err(TransportError::GridTooCoarse { grid_points: self.grid_points, minimum: MIN_GRID_POINTS });
        }
        Ok(())
    }
}

/// Which lead carries the incident wave.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Injection {
    /// From the `R1` cylinder at `z < -a`.
    Left,
    /// From the `R2` cylinder at `z > a`.
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LeadChannel<T> {
    /// Wavenumber of a propagating wave.
    Propagating(T),
    /// Decay constant of a closed channel.
    Evanescent(T),
}

impl<T: Scalar> LeadChannel<T> {
    pub fn wavenumber(&self) -> Option<T> {
        match *self {
            LeadChannel::Propagating(k) => Some(k),
            LeadChannel::Evanescent(_) => None,
        }
    }
}

/// Continuum lead wavenumbers `k1` (incoming, `R1`) and `k2` (outgoing, `R2`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeadWavenumbers<T> {
    pub k1: T,
    pub k2: LeadChannel<T>,
}

#[derive(Clone, Debug)]
pub struct ScatteringSolution<T> {
    /// Reflection amplitude in the injection lead.
    pub r: Complex<T>,
    /// Transmission amplitude in the opposite lead.
    pub t: Complex<T>,
    pub transmission: T,
    pub reflection: T,
    /// Lattice wavenumber in the `R1` lead.
    pub k1: LeadChannel<T>,
    /// Lattice wavenumber in the `R2` lead.
    pub k2: LeadChannel<T>,
    pub total_energy: T,
    pub injection: Injection,
    pub z: Vec<T>,
    pub phi: Vec<Complex<T>>,
    /// Conditioning indicator of the banded solve.
    pub pivot_ratio: T,
}

/// Geometric potential of a lead cylinder of radius `r`.
fn lead_potential<T: Scalar>(r: T, scale: KineticScale<T>, enabled: bool) -> T {
    if enabled {
        -scale.value() / (T::lit(4.0) * r * r)
    } else {
        T::zero()
    }
}

fn centrifugal<T: Scalar>(n: u32, r: T, scale: KineticScale<T>) -> T {
    let n = T::from_u32(n).expect("mode index fits a float");
    scale.value() * n * n / (r * r)
}

/// `E = E_l + (ħ²/2m) n²/R1² + U_in` with `U_in = -(ħ²/2m)/(4 R1²)`.
pub fn total_energy<T: Scalar>(config: &ScatterConfig<T>, junction: &JunctionGeometry<T>) -> T {
    let scale = config.scale();
    let r1 = junction.r1();
    config.energy_l + centrifugal(config.mode_n, r1, scale) + lead_potential(r1, scale, config.geometric_potential)
}

/// Continuum wavenumbers `k_i = √(2m(E - ħ²n²/(2mR_i²) + ħ²/(8mR_i²)))/ħ`.
pub fn lead_wavenumbers<T: Scalar>(
    junction: &JunctionGeometry<T>,
    energy: T,
    mode_n: u32,
    mass_ratio: T,
) -> Result<LeadWavenumbers<T>, TransportError> {
    let scale = KineticScale::from_mass_ratio(mass_ratio);
    let kinetic = |r: T| energy - centrifugal(mode_n, r, scale) - lead_potential(r, scale, true);
    let e1 = kinetic(junction.r1());
    if !(e1 > T::zero()) {
        return Err(TransportError::ClosedIncomingChannel { kinetic: e1.to_f64_lossy() });
    }
    let e2 = kinetic(junction.r2());
    let k2 = if e2 > T::zero() {
        LeadChannel::Propagating((e2 / scale.value()).sqrt())
    } else {
        LeadChannel::Evanescent((-e2 / scale.value()).sqrt())
    };
    Ok(LeadWavenumbers { k1: (e1 / scale.value()).sqrt(), k2 })
}

/// Injects from the `R1` lead at `E = total_energy(config, junction)`.
pub fn solve_scattering<T: Scalar>(
    junction: &JunctionGeometry<T>,
    config: &ScatterConfig<T>,
) -> Result<ScatteringSolution<T>, TransportError> {
    config.validate()?;
    solve_scattering_at(junction, total_energy(config, junction), config, Injection::Left)
}

/// Solves at a given total energy, injecting from either lead. `config.energy_l`
/// is ignored.
pub fn solve_scattering_at<T: Scalar>(
    junction: &JunctionGeometry<T>,
    energy: T,
    config: &ScatterConfig<T>,
    injection: Injection,
) -> Result<ScatteringSolution<T>, TransportError> {
    if !(config.mass_ratio > T::zero()) {
        return Err(TransportError::InvalidConfig("mass ratio must be positive".into()));
    }
    if config.grid_points < MIN_GRID_POINTS {
        return Err(TransportError::GridTooCoarse { grid_points: config.grid_points, minimum: MIN_GRID_POINTS });
    }
    let scale = config.scale();
    let c = scale.value();
    let n_nodes = config.grid_points + 2;
    let a = junction.half_length();
    let h = (a + a) / T::from_usize_lossy(config.grid_points + 1);
    let hop = c / (h * h);
    let z: Vec<T> = (0..n_nodes)
        .map(|i| if i + 1 == n_nodes { a } else { -a + h * T::from_usize_lossy(i) })
        .collect();

    let (r1, r2) = (junction.r1(), junction.r2());
    let gp = config.geometric_potential;
    let lead_kinetic = |r: T| energy - centrifugal(config.mode_n, r, scale) - lead_potential(r, scale, gp);
    let k1 = lattice_channel(lead_kinetic(r1), h, c)?;
    let k2 = lattice_channel(lead_kinetic(r2), h, c)?;
    let (k_in, k_out) = match injection {
        Injection::Left => (k1, k2),
        Injection::Right => (k2, k1),
    };
    let k_in = match k_in {
        LeadChannel::Propagating(k) => k,
        LeadChannel::Evanescent(_) => {
            let r_in = if injection == Injection::Left { r1 } else { r2 };
            return Err(TransportError::ClosedIncomingChannel { kinetic: lead_kinetic(r_in).to_f64_lossy() });
        }
    };

    // p at half points; index i couples nodes i and i+1
    let half = T::lit(0.5);
    let p_half: Vec<T> = (0..n_nodes - 1)
        .map(|i| {
            let s = junction.profile(z[i] + half * h);
            s.f / (T::one() + s.f_z * s.f_z).sqrt()
        })
        .collect();
    let weight: Vec<T> = z
        .iter()
        .map(|&zi| {
            let s = junction.profile(zi);
            s.f * (T::one() + s.f_z * s.f_z).sqrt()
        })
        .collect();

    let zero = Complex::new(T::zero(), T::zero());
    let mut lower = vec![zero; n_nodes - 1];
    let mut upper = vec![zero; n_nodes - 1];
    let mut diag = vec![zero; n_nodes];
    for i in 0..n_nodes {
        let p_left = if i == 0 { r1 } else { p_half[i - 1] };
        let p_right = if i + 1 == n_nodes { r2 } else { p_half[i] };
        let pot = cell_average_potential(junction, z[i], h, scale, config.mode_n, gp);
        diag[i] = Complex::new(hop * (p_left + p_right) + pot - energy * weight[i], T::zero());
    }
    for i in 0..n_nodes - 1 {
        let v = Complex::new(-hop * p_half[i], T::zero());
        lower[i] = v;
        upper[i] = v;
    }

    // boundary closures φ_outside = e^{ikh} φ_edge (- 2i sin(kh) A for the
    // incident side, A the incident wave at the edge node)
    let mut rhs = vec![zero; n_nodes];
    let (first, last) = (0, n_nodes - 1);
    let (in_node, out_node, p_in, p_out, z_in, z_out) = match injection {
        Injection::Left => (first, last, r1, r2, z[first], z[last]),
        Injection::Right => (last, first, r2, r1, z[last], z[first]),
    };
    // direction of the incident wave: +z from the left, -z from the right
    let dir = if injection == Injection::Left { T::one() } else { -T::one() };
    let incident = Complex::from_polar(T::one(), dir * k_in * z_in);
    let i_unit = Complex::new(T::zero(), T::one());
    let e_in = Complex::from_polar(T::one(), k_in * h);
    diag[in_node] = diag[in_node] - e_in * hop * p_in;
    rhs[in_node] = -(i_unit * (T::lit(2.0) * (k_in * h).sin() * hop * p_in)) * incident;
    let e_out = match k_out {
        LeadChannel::Propagating(k) => Complex::from_polar(T::one(), k * h),
        LeadChannel::Evanescent(kappa) => Complex::new((-kappa * h).exp(), T::zero()),
    };
    diag[out_node] = diag[out_node] - e_out * hop * p_out;

    let sol = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
    let phi = sol.x;

    let reflected = phi[in_node] - incident;
    // reflected wave travels opposite to the incident one
    let r = reflected * Complex::from_polar(T::one(), dir * k_in * z_in);
    let (t, transmission) = match k_out {
        LeadChannel::Propagating(k) => {
            let t = phi[out_node] * Complex::from_polar(T::one(), -dir * k * z_out);
            let flux_ratio = (p_out * (k * h).sin()) / (p_in * (k_in * h).sin());
            (t, flux_ratio * t.norm_sqr())
        }
        LeadChannel::Evanescent(_) => (phi[out_node], T::zero()),
    };
    Ok(ScatteringSolution {
        r,
        t,
        transmission,
        reflection: r.norm_sqr(),
        k1,
        k2,
        total_energy: energy,
        injection,
        z,
        phi,
        pivot_ratio: sol.pivot_ratio,
    })
}

/// Lattice dispersion `(ħ²/2m)(2 - 2cos kh)/h² = ε`.
fn lattice_channel<T: Scalar>(kinetic: T, h: T, c: T) -> Result<LeadChannel<T>, TransportError> {
    let cos_kh = T::one() - kinetic * h * h / (T::lit(2.0) * c);
    if kinetic > T::zero() {
        if cos_kh < -T::one() {
            return Err(TransportError::AboveBand { kinetic: kinetic.to_f64_lossy() });
        }
        Ok(LeadChannel::Propagating(cos_kh.acos() / h))
    } else {
        Ok(LeadChannel::Evanescent(cos_kh.acosh() / h))
    }
}

const GAUSS4_NODES: [f64; 4] = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
const GAUSS4_WEIGHTS: [f64; 4] = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];

/// `(1/h) ∫ [U + (ħ²/2m) n²/ρ²] w dz` over the cell of the node at `zc`,
/// split at the profile's branch points.
fn cell_average_potential<T: Scalar>(
    junction: &JunctionGeometry<T>,
    zc: T,
    h: T,
    scale: KineticScale<T>,
    mode_n: u32,
    gp: bool,
) -> T {
    let half = T::lit(0.5);
    let lo = zc - half * h;
    let hi = zc + half * h;
    let mut cuts = [lo; 6];
    let mut len = 1;
    for b in junction.branch_points() {
        if b > lo && b < hi {
            cuts[len] = b;
            len += 1;
        }
    }
    cuts[len] = hi;
    len += 1;
    let n = T::from_u32(mode_n).expect("mode index fits a float");
    let integrand = |z: T| {
        let s = junction.profile(z);
        let w = s.f * (T::one() + s.f_z * s.f_z).sqrt();
        let u = if gp { potential_from_profile(s, scale) } else { T::zero() };
        (u + scale.value() * n * n / (s.f * s.f)) * w
    };
    let mut total = T::zero();
    for seg in cuts[..len].windows(2) {
        let (x0, x1) = (seg[0], seg[1]);
        let mid = half * (x0 + x1);
        let rad = half * (x1 - x0);
        let mut s = T::zero();
        for (xn, wn) in GAUSS4_NODES.iter().zip(GAUSS4_WEIGHTS.iter()) {
            s = s + T::lit(*wn) * integrand(mid + rad * T::lit(*xn));
        }
        total = total + s * rad;
    }
    total / h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig6(r1: f64) -> JunctionGeometry<f64> {
        JunctionGeometry::<f64>::new(r1, 2.0, 10.0, 2.0).unwrap()
    }

    #[test]
    fn total_energy_examples() {
        let cfg = ScatterConfig::new(10.0);
        let e = total_energy(&cfg, &fig6(40.0));
        let c = 38.0998 / 0.173;
        assert!((e - (10.0 - c / 6400.0)).abs() < 1e-12);
        assert!((e - 9.9656).abs() < 1e-4);

        let far = JunctionGeometry::<f64>::new(1e9, 2.0, 10.0, 2.0).unwrap();
        assert!((total_energy(&cfg, &far) - 10.0).abs() < 1e-12);

        let mut cfg1 = ScatterConfig::new(5.0);
        cfg1.mode_n = 1;
        let j = JunctionGeometry::<f64>::new(10.0, 2.0, 12.0, 2.0).unwrap();
        assert!((total_energy(&cfg1, &j) - (5.0 + c / 100.0 - c / 400.0)).abs() < 1e-12);
    }

    #[test]
    fn lead_wavenumber_examples() {
        let c = 38.0998 / 0.173;
        let j = fig6(40.0);
        let cfg = ScatterConfig::new(10.0);
        let e = total_energy(&cfg, &j);
        let k = lead_wavenumbers(&j, e, 0, 0.173).unwrap();
        assert!((k.k1 - (10.0f64 / c).sqrt()).abs() < 1e-12);
        assert!((k.k1 - 0.2131).abs() < 1e-4);
        let k2 = k.k2.wavenumber().unwrap();
        assert!((k2 - ((e + c / 16.0) / c).sqrt()).abs() < 1e-12);
        assert!(k2 > k.k1);

        let sym = JunctionGeometry::<f64>::new(7.0, 7.0, 10.0, 2.0).unwrap();
        let k = lead_wavenumbers(&sym, 3.0, 0, 0.173).unwrap();
        assert_eq!(Some(k.k1), k.k2.wavenumber());

        assert!(matches!(lead_wavenumbers(&j, -5.0, 0, 0.173), Err(TransportError::ClosedIncomingChannel { .. })));
    }

    #[test]
    fn n1_outgoing_channel_can_close() {
        // thin outgoing lead pushes the n = 1 threshold far above the energy
        let j = JunctionGeometry::<f64>::new(40.0, 2.0, 10.0, 2.0).unwrap();
        let k = lead_wavenumbers(&j, 1.0, 1, 0.173).unwrap();
        assert!(matches!(k.k2, LeadChannel::Evanescent(_)));
        let mut cfg = ScatterConfig::new(1.0);
        cfg.mode_n = 1;
        let sol = solve_scattering(&j, &cfg).unwrap();
        assert_eq!(sol.transmission, 0.0);
        assert!((sol.reflection - 1.0).abs() < 1e-9, "{}", sol.reflection);
    }

    #[test]
    fn uniform_cylinder_is_transparent() {
        let j = JunctionGeometry::<f64>::new(5.0, 5.0, 10.0, 2.0).unwrap();
        for e in [0.1, 3.0, 25.0, 50.0] {
            let sol = solve_scattering(&j, &ScatterConfig::new(e)).unwrap();
            assert!((sol.transmission - 1.0).abs() < 1e-8, "E={e}: {}", sol.transmission);
            assert!(sol.r.norm() < 1e-6);
        }
    }

    #[test]
    fn current_is_conserved() {
        for (r1, e) in [(40.0, 10.0), (20.0, 0.7), (10.0, 33.0)] {
            let sol = solve_scattering(&fig6(r1), &ScatterConfig::new(e)).unwrap();
            assert!((sol.transmission + sol.reflection - 1.0).abs() < 1e-9);
            assert!(sol.transmission >= 0.0 && sol.transmission <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn low_energy_limit_is_opaque() {
        let sol = solve_scattering(&fig6(40.0), &ScatterConfig::new(0.01)).unwrap();
        assert!(sol.transmission < 0.1, "{}", sol.transmission);
    }

    #[test]
    fn rejects_coarse_grid_and_bad_energy() {
        let j = fig6(40.0);
        assert!(matches!(
            solve_scattering(&j, &ScatterConfig::new(1.0).with_grid_points(50)),
            Err(TransportError::GridTooCoarse { .. })
        ));
        assert!(solve_scattering(&j, &ScatterConfig::new(-1.0)).is_err());
    }

    #[test]
    fn right_injection_matches_left() {
        let j = JunctionGeometry::<f64>::new(30.0, 3.0, 10.0, 1.0).unwrap();
        let cfg = ScatterConfig::new(12.0);
        let e = total_energy(&cfg, &j);
        let left = solve_scattering_at(&j, e, &cfg, Injection::Left).unwrap();
        let right = solve_scattering_at(&j, e, &cfg, Injection::Right).unwrap();
        assert!((left.transmission - right.transmission).abs() < 1e-9);
        assert!((right.transmission + right.reflection - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_precision_solve() {
        let j = JunctionGeometry::<f32>::new(10.0, 2.0, 10.0, 2.0).unwrap();
        let sol = solve_scattering(&j, &ScatterConfig::new(10.0f32).with_grid_points(800)).unwrap();
        assert!((sol.transmission + sol.reflection - 1.0).abs() < 1e-3);
    }
}

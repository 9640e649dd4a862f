//! Hard-wall bound states on a truncated cone `f(z) = rho + lambda z`,
//! `0 <= z <= z_max`.
//!
//! Separating `Θ(θ) = e^{iηθ}`, the axial factor satisfies
//!
//! ```text
//! (f Z')' + [ (1/4 - η²(1+λ²)) / f  +  k² (1+λ²) f ] Z = 0,   Z(0) = Z(z_max) = 0
//! ```
//!
//! with `k² = 2mω/ħ²`. The `1/4` term is the geometric potential. Eigenvalues
//! are reported through the dimensionless `c = ρ k`, so `ω = (ħ²/2m) c²/ρ²`.
//! A level can sit below zero energy (the geometric potential is attractive);
//! the `*_squared` entry points return `c²` with its sign for that reason.
//!
//! Two independent routes are provided: shooting on the ODE with Sturm node
//! counting ([`find_eigenvalues`]) and a self-adjoint finite-difference
//! discretization ([`fd_spectrum_oracle`]).

mod fd;
mod shooting;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{potential_from_profile, ProfileSample};
use crate::linalg::LinalgError;
use crate::ode::OdeError;
use crate::scalar::Scalar;
use crate::units::KineticScale;

pub use fd::{fd_spectrum_oracle, fd_spectrum_oracle_squared};
pub use shooting::{
    axial_residual, eigenfunction, eigenfunction_squared, find_eigenvalues, find_eigenvalues_squared,
    find_eigenvalues_squared_with, shoot, Shot, ShootingOptions,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AxialError {
    #[error("invalid cone: {0}")]
    InvalidGeometry(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("ODE integration failed: {0}")]
    Ode(#[from] OdeError),
    #[error("found only {found} of {requested} eigenvalues below the scan ceiling c = {ceiling}")]
    NotBracketed { found: usize, requested: usize, ceiling: f64 },
    #[error("level {index} has c^2 = {c_squared} <= 0 (negative surface energy); use the squared variant")]
    NonPositiveLevel { index: usize, c_squared: f64 },
    #[error("normalization integral is not finite")]
    NormalizationNonFinite,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeGeometry<T> {
    rho: T,
    lambda: T,
    z_max: T,
}

impl<T: Scalar> ConeGeometry<T> {
    /// `rho` is the smaller-end radius, `lambda = tan β` the slope of the
    /// generatrix, `z_max` the axial height.
    pub fn new(rho: T, lambda: T, z_max: T) -> Result<Self, AxialError> {
        for (name, v) in [("rho", rho), ("lambda", lambda), ("z_max", z_max)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(AxialError::InvalidGeometry(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(ConeGeometry { rho, lambda, z_max })
    }

    pub fn rho(&self) -> T {
        self.rho
    }
    pub fn lambda(&self) -> T {
        self.lambda
    }
    pub fn z_max(&self) -> T {
        self.z_max
    }

    pub fn radius(&self, z: T) -> T {
        self.rho + self.lambda * z
    }

    /// `1 + λ²`
    pub fn slope_factor(&self) -> T {
        T::one() + self.lambda * self.lambda
    }

    /// Surface weight `f √(1+λ²)` (area element with the θ integral removed).
    pub fn weight(&self, z: T) -> T {
        self.radius(z) * self.slope_factor().sqrt()
    }

    pub(crate) fn profile(&self, z: T) -> ProfileSample<T> {
        ProfileSample { f: self.radius(z), f_z: self.lambda, f_zz: T::zero() }
    }

    /// Geometric potential on the cone at `z`.
    pub fn potential(&self, z: T, scale: KineticScale<T>) -> T {
        potential_from_profile(self.profile(z), scale)
    }

    /// `1/4 - η²(1+λ²)`: the coefficient of `Z/f` in the axial equation.
    pub(crate) fn centrifugal_coefficient(&self, eta: i64) -> T {
        let e = T::from_i64(eta).expect("eta fits a float");
        T::lit(0.25) - e * e * self.slope_factor()
    }

    /// Converts `c²` to the `μ = k²(1+λ²)` multiplying `f Z` in the ODE.
    pub(crate) fn mu_from_c_squared(&self, c_squared: T) -> T {
        c_squared * self.slope_factor() / (self.rho * self.rho)
    }

    pub(crate) fn c_squared_from_mu(&self, mu: T) -> T {
        mu * self.rho * self.rho / self.slope_factor()
    }
}

/// Azimuthal channel `η` with the order of the cylinder functions solving the
/// axial equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelIndex<T> {
    pub eta: i64,
    pub order_delta: Complex<T>,
}

impl<T: Scalar> ChannelIndex<T> {
    pub fn new(eta: i64, lambda: T) -> Self {
        ChannelIndex { eta, order_delta: order_delta(eta, lambda) }
    }
}

/// `δ(η, λ) = λ⁻¹ √(η²(1+λ²) - 1/4)` on the principal branch, imaginary part
/// non-negative: purely imaginary for `η = 0`, real for `|η| >= 1`.
pub fn order_delta<T: Scalar>(eta: i64, lambda: T) -> Complex<T> {
    let e = T::from_i64(eta).expect("eta fits a float");
    let radicand = e * e * (T::one() + lambda * lambda) - T::lit(0.25);
    if radicand >= T::zero() {
        Complex::new(radicand.sqrt() / lambda, T::zero())
    } else {
        Complex::new(T::zero(), (-radicand).sqrt() / lambda)
    }
}

/// A normalized axial bound state.
#[derive(Clone, Debug)]
pub struct AxialMode<T> {
    pub channel: ChannelIndex<T>,
    /// Number of interior nodes.
    pub index_n: usize,
    /// `c² = ρ² 2mω/ħ²` (negative for a level below zero energy).
    pub c_squared: T,
    pub z_grid: Vec<T>,
    /// `Z(z)` normalized so that `∫ Z² f √(1+λ²) dz = 1`.
    pub samples: Vec<T>,
}

impl<T: Scalar> AxialMode<T> {
    /// `c = ρ√(2mω)/ħ`, if the level has positive energy.
    pub fn c_value(&self) -> Option<T> {
        (self.c_squared > T::zero()).then(|| self.c_squared.sqrt())
    }

    /// Surface energy `ω = (ħ²/2m) c² / ρ²`.
    pub fn omega(&self, cone: &ConeGeometry<T>, scale: KineticScale<T>) -> T {
        scale.value() * self.c_squared / (cone.rho() * cone.rho())
    }

    /// `|Z(z)|²` on the grid.
    pub fn probability_density(&self) -> Vec<T> {
        self.samples.iter().map(|z| *z * *z).collect()
    }
}

/// `n` uniformly spaced points on `[0, z_max]`.
pub fn uniform_grid<T: Scalar>(z_max: T, n: usize) -> Vec<T> {
    let n = n.max(2);
    let step = z_max / T::from_usize_lossy(n - 1);
    let mut g: Vec<T> = (0..n).map(|i| step * T::from_usize_lossy(i)).collect();
    g[n - 1] = z_max;
    g
}

/// Default output grid size for eigenfunctions.
pub const DEFAULT_GRID_POINTS: usize = 2001;

/// `⟨U⟩ = ∫ U(z) Z(z)² f √(1+λ²) dz` for the state `mode`, in the energy unit
/// of `scale`.
///
/// The integral is accumulated alongside a fresh integration of the axial
/// equation, so it does not depend on the resolution of `mode.z_grid`.
pub fn gp_expectation<T: Scalar>(
    cone: &ConeGeometry<T>,
    mode: &AxialMode<T>,
    scale: KineticScale<T>,
) -> Result<T, AxialError> {
    let eta = mode.channel.eta.abs();
    let mu = cone.mu_from_c_squared(mode.c_squared);
    let a = cone.centrifugal_coefficient(eta);
    let opts = ShootingOptions::<T>::default();
    let solver = opts.ode.with_max_step(shooting::max_step(cone, a, mu));
    let slope = cone.slope_factor().sqrt();
    let leg = solver.integrate(
        |z, y: &[T; 4]| {
            let f = cone.radius(z);
            let w = f * slope;
            let dens = y[0] * y[0] * w;
            [y[1] / f, -(a / f + mu * f) * y[0], dens, cone.potential(z, scale) * dens]
        },
        T::zero(),
        [T::zero(), cone.rho(), T::zero(), T::zero()],
        cone.z_max(),
        None,
        |_, _| {},
    )?;
    let norm = leg.y[2];
    if !norm.is_finite() || norm <= T::zero() {
        return Err(AxialError::NormalizationNonFinite);
    }
    Ok(leg.y[3] / norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_delta_examples() {
        let d = order_delta(0, 1.0f64);
        assert!(d.re == 0.0 && (d.im - 0.5).abs() < 1e-15);
        let d = order_delta(0, 2.0f64);
        assert!(d.re == 0.0 && (d.im - 0.25).abs() < 1e-15);
        let d = order_delta(1, 1.0f64);
        assert!((d.re - 1.75f64.sqrt()).abs() < 1e-15 && d.im == 0.0);
        assert!((d.re - 1.3229).abs() < 1e-4);
        assert_eq!(order_delta(-2, 0.7f64), order_delta(2, 0.7f64));
    }

    #[test]
    fn cone_validation() {
        assert!(ConeGeometry::new(1.0, 1.0, 1.5).is_ok());
        assert!(ConeGeometry::new(0.0, 1.0, 1.5).is_err());
        assert!(ConeGeometry::new(1.0, -1.0, 1.5).is_err());
        assert!(ConeGeometry::new(1.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = uniform_grid(1.5f64, DEFAULT_GRID_POINTS);
        assert_eq!(g.len(), 2001);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[2000], 1.5);
    }
}

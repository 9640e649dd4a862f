//! Finite-difference spectrum of the axial operator, used as an independent
//! check on the shooting eigenvalues.
//!
//! Interior nodes `z_j = j h`, `h = z_max/(n+1)`, with the flux `f Z'` taken at
//! half points. The generalized problem `K Z = μ diag(f) Z` is symmetrized by
//! `diag(f)^{-1/2}` and its lowest eigenvalues are found by Sturm bisection.
//! Converges at second order in `h`.

use super::{AxialError, ConeGeometry};
use crate::linalg::symmetric_tridiagonal_lowest;
use crate::scalar::Scalar;

/// Lowest `count` eigenvalues `c²` from an `n_points` interior-node grid.
pub fn fd_spectrum_oracle_squared<T: Scalar>(
    cone: &ConeGeometry<T>,
    eta: i64,
    n_points: usize,
    count: usize,
) -> Result<Vec<T>, AxialError> {
    if n_points < 200 {
        return Err(AxialError::InvalidArgument(format!("n_points must be at least 200, got {n_points}")));
    }
    if count == 0 || count > n_points {
        return Err(AxialError::InvalidArgument(format!("count {count} out of range")));
    }
    let a = cone.centrifugal_coefficient(eta.abs());
    let h = cone.z_max() / T::from_usize_lossy(n_points + 1);
    let h2 = h * h;
    let half = T::lit(0.5);
    let node = |j: usize| cone.radius(h * T::from_usize_lossy(j));
    let flux = |j: usize| cone.radius(h * (T::from_usize_lossy(j) + half));

    let diag: Vec<T> = (1..=n_points)
        .map(|j| {
            let f = node(j);
            (flux(j) + flux(j - 1)) / (h2 * f) - a / (f * f)
        })
        .collect();
    let off: Vec<T> = (1..n_points).map(|j| -flux(j) / (h2 * (node(j) * node(j + 1)).sqrt())).collect();
    let mu = symmetric_tridiagonal_lowest(&diag, &off, count)?;
    Ok(mu.into_iter().map(|m| cone.c_squared_from_mu(m)).collect())
}

/// As [`fd_spectrum_oracle_squared`], returning `c = √(c²)`; fails if a level
/// lies at or below zero energy.
pub fn fd_spectrum_oracle<T: Scalar>(
    cone: &ConeGeometry<T>,
    eta: i64,
    n_points: usize,
    count: usize,
) -> Result<Vec<T>, AxialError> {
    fd_spectrum_oracle_squared(cone, eta, n_points, count)?
        .into_iter()
        .enumerate()
        .map(|(index, c2)| {
            if c2 > T::zero() {
                Ok(c2.sqrt())
            } else {
                Err(AxialError::NonPositiveLevel { index, c_squared: c2.to_f64_lossy() })
            }
        })
        .collect()
}

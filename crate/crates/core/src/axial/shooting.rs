//! Shooting from `z = 0` with `Z(0) = 0`, `Z'(0) = 1`; the mismatch `Z(z_max)`
//! vanishes exactly at the eigenvalues. Interior zeros of the shot solution
//! count the eigenvalues below the trial value (Sturm oscillation), which is
//! what makes the root scan complete.

use super::{AxialError, AxialMode, ChannelIndex, ConeGeometry};
use crate::ode::Dopri5;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug)]
pub struct ShootingOptions<T> {
    pub ode: Dopri5<T>,
    /// Initial scan step in `c`.
    pub scan_step: T,
    /// Absolute tolerance on `c` (on the signed root `s`, `c² = s|s|`).
    pub root_tol: T,
    /// Largest `c` the scan visits before giving up.
    pub scan_ceiling: T,
}

impl<T: Scalar> Default for ShootingOptions<T> {
    fn default() -> Self {
        ShootingOptions {
            ode: Dopri5::default(),
            scan_step: T::lit(0.02),
            root_tol: T::lit(T::ROOT_TOL),
            scan_ceiling: T::lit(1e4),
        }
    }
}

/// Outcome of one shot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shot<T> {
    /// `Z(z_max)`
    pub residual: T,
    /// Zeros of `Z` in the open interval `(0, z_max)`.
    pub nodes: usize,
}

pub(crate) fn max_step<T: Scalar>(cone: &ConeGeometry<T>, centrifugal: T, mu: T) -> T {
    let k2 = mu.abs() + centrifugal.abs() / (cone.rho() * cone.rho());
    let by_wavelength = T::lit(0.5) / k2.sqrt().max(T::epsilon());
    (cone.z_max() / T::lit(64.0)).min(by_wavelength)
}

/// Integrates the axial equation for a trial `c²` and reports the boundary
/// mismatch and the node count.
pub fn shoot<T: Scalar>(
    cone: &ConeGeometry<T>,
    eta: i64,
    c_squared: T,
    opts: &ShootingOptions<T>,
) -> Result<Shot<T>, AxialError> {
    let a = cone.centrifugal_coefficient(eta.abs());
    let mu = cone.mu_from_c_squared(c_squared);
    let solver = opts.ode.with_max_step(max_step(cone, a, mu));
    let mut nodes = 0usize;
    let mut prev = T::zero();
    let z_max = cone.z_max();
    let leg = solver.integrate(
        |z, y: &[T; 2]| {
            let f = cone.radius(z);
            [y[1] / f, -(a / f + mu * f) * y[0]]
        },
        T::zero(),
        [T::zero(), cone.rho()],
        z_max,
        None,
        |z, y| {
            if z < z_max && y[0] != T::zero() {
                if prev != T::zero() && (prev > T::zero()) != (y[0] > T::zero()) {
                    nodes += 1;
                }
                prev = y[0];
            }
        },
    )?;
    // a sign flip on the very last step lands at z_max itself only when the
    // residual is exactly zero; otherwise it is an interior node
    let last = leg.y[0];
    if last != T::zero() && prev != T::zero() && (prev > T::zero()) != (last > T::zero()) {
        nodes += 1;
    }
    Ok(Shot { residual: last, nodes })
}

/// Shooting mismatch `Z(z_max)` for `Z(0) = 0`, `Z'(0) = 1`, as a function of
/// `c > 0`. Its zeros are the eigenvalues.
pub fn axial_residual<T: Scalar>(cone: &ConeGeometry<T>, eta: i64, c: T) -> Result<T, AxialError> {
    if !(c > T::zero()) {
        return Err(AxialError::InvalidArgument(format!("c must be positive, got {c}")));
    }
    Ok(shoot(cone, eta, c * c, &ShootingOptions::default())?.residual)
}

/// Lowest `count` eigenvalues `c_n`, ascending. Fails with
/// [`AxialError::NonPositiveLevel`] if one of them lies at or below zero
/// energy.
pub fn find_eigenvalues<T: Scalar>(cone: &ConeGeometry<T>, eta: i64, count: usize) -> Result<Vec<T>, AxialError> {
    let sq = find_eigenvalues_squared(cone, eta, count)?;
    sq.iter()
        .enumerate()
        .map(|(index, &c2)| {
            if c2 > T::zero() {
                Ok(c2.sqrt())
            } else {
                Err(AxialError::NonPositiveLevel { index, c_squared: c2.to_f64_lossy() })
            }
        })
        .collect()
}

/// Lowest `count` eigenvalues as signed `c²`, ascending.
pub fn find_eigenvalues_squared<T: Scalar>(
    cone: &ConeGeometry<T>,
    eta: i64,
    count: usize,
) -> Result<Vec<T>, AxialError> {
    find_eigenvalues_squared_with(cone, eta, count, &ShootingOptions::default())
}

pub fn find_eigenvalues_squared_with<T: Scalar>(
    cone: &ConeGeometry<T>,
    eta: i64,
    count: usize,
    opts: &ShootingOptions<T>,
) -> Result<Vec<T>, AxialError> {
    if count == 0 {
        return Err(AxialError::InvalidArgument("count must be at least 1".into()));
    }
    let eta = eta.abs();
    // Rayleigh quotient bound: c² > -max(A, 0)/(1+λ²) with A = 1/4 - η²(1+λ²)
    let a = cone.centrifugal_coefficient(eta);
    let floor_c2 = -(a.max(T::zero())) / cone.slope_factor();
    let s_floor = -(-floor_c2).sqrt();
    let sq = |s: T| s * s.abs();

    let mut roots: Vec<Option<T>> = vec![None; count];
    let mut found = 0usize;
    let mut s = s_floor;
    let mut at_s = shoot(cone, eta, sq(s), opts)?;
    while found < count {
        let s_next = s + opts.scan_step;
        if s_next > opts.scan_ceiling {
            return Err(AxialError::NotBracketed {
                found,
                requested: count,
                ceiling: opts.scan_ceiling.to_f64_lossy(),
            });
        }
        let at_next = shoot(cone, eta, sq(s_next), opts)?;
        collect_roots(cone, eta, opts, (s, at_s), (s_next, at_next), &mut roots, &mut found, 0)?;
        s = s_next;
        at_s = at_next;
    }
    Ok(roots.into_iter().map(|r| sq(r.expect("every index filled"))).collect())
}

#[allow(clippy::too_many_arguments)]
fn collect_roots<T: Scalar>(
    cone: &ConeGeometry<T>,
    eta: i64,
    opts: &ShootingOptions<T>,
    lo: (T, Shot<T>),
    hi: (T, Shot<T>),
    roots: &mut [Option<T>],
    found: &mut usize,
    depth: usize,
) -> Result<(), AxialError> {
    let jump = hi.1.nodes.saturating_sub(lo.1.nodes);
    let sign_change = (lo.1.residual > T::zero()) != (hi.1.residual > T::zero());
    if jump == 0 && !sign_change {
        return Ok(());
    }
    if jump == 1 && sign_change {
        let index = lo.1.nodes;
        if index < roots.len() && roots[index].is_none() {
            roots[index] = Some(refine(cone, eta, opts, lo, hi)?);
            *found += 1;
        }
        return Ok(());
    }
    if depth > 48 {
        return Err(AxialError::InvalidArgument(format!(
            "could not separate eigenvalues near c = {}",
            lo.0
        )));
    }
    let mid = (lo.0 + hi.0) / T::lit(2.0);
    let at_mid = shoot(cone, eta, mid * mid.abs(), opts)?;
    collect_roots(cone, eta, opts, lo, (mid, at_mid), roots, found, depth + 1)?;
    collect_roots(cone, eta, opts, (mid, at_mid), hi, roots, found, depth + 1)
}

/// Bisection down to a narrow bracket, then Illinois-safeguarded secant steps.
fn refine<T: Scalar>(
    cone: &ConeGeometry<T>,
    eta: i64,
    opts: &ShootingOptions<T>,
    lo: (T, Shot<T>),
    hi: (T, Shot<T>),
) -> Result<T, AxialError> {
    let sq = |s: T| s * s.abs();
    let residual = |s: T| shoot(cone, eta, sq(s), opts).map(|r| r.residual);
    let (mut a, mut fa) = (lo.0, lo.1.residual);
    let (mut b, mut fb) = (hi.0, hi.1.residual);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    let two = T::lit(2.0);
    let coarse = opts.scan_step / T::lit(64.0);
    while b - a > coarse {
        let m = (a + b) / two;
        let fm = residual(m)?;
        if fm == T::zero() {
            return Ok(m);
        }
        if (fm > T::zero()) == (fa > T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    let mut side = 0i8;
    let mut x_prev = (a + b) / two;
    for _ in 0..200 {
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a && x < b) {
            x = (a + b) / two;
        }
        let fx = residual(x)?;
        if fx == T::zero() || (x - x_prev).abs() < opts.root_tol || b - a < opts.root_tol {
            return Ok(x);
        }
        x_prev = x;
        if (fx > T::zero()) == (fa > T::zero()) {
            a = x;
            fa = fx;
            if side == 1 {
                fb = fb / two;
            }
            side = 1;
        } else {
            b = x;
            fb = fx;
            if side == -1 {
                fa = fa / two;
            }
            side = -1;
        }
    }
    Ok((a + b) / two)
}

/// Normalized eigenfunction for a validated eigenvalue `c_n > 0`.
pub fn eigenfunction<T: Scalar>(
    cone: &ConeGeometry<T>,
    eta: i64,
    c_n: T,
    grid: &[T],
) -> Result<AxialMode<T>, AxialError> {
    if !(c_n > T::zero()) {
        return Err(AxialError::InvalidArgument(format!("c_n must be positive, got {c_n}")));
    }
    eigenfunction_squared(cone, eta, c_n * c_n, grid)
}

/// Normalized eigenfunction sampled on `grid` (ascending, inside
/// `[0, z_max]`) for the eigenvalue `c²`.
pub fn eigenfunction_squared<T: Scalar>(
    cone: &ConeGeometry<T>,
    eta: i64,
    c_squared: T,
    grid: &[T],
) -> Result<AxialMode<T>, AxialError> {
    let z_max = cone.z_max();
    if grid.is_empty() {
        return Err(AxialError::InvalidArgument("empty grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] >= w[0])) || grid[0] < T::zero() || grid[grid.len() - 1] > z_max {
        return Err(AxialError::InvalidArgument("grid must be ascending within [0, z_max]".into()));
    }
    let eta_abs = eta.abs();
    let a = cone.centrifugal_coefficient(eta_abs);
    let mu = cone.mu_from_c_squared(c_squared);
    let opts = ShootingOptions::<T>::default();
    let solver = opts.ode.with_max_step(max_step(cone, a, mu));
    let slope = cone.slope_factor().sqrt();
    let rhs = |z: T, y: &[T; 3]| {
        let f = cone.radius(z);
        [y[1] / f, -(a / f + mu * f) * y[0], y[0] * y[0] * f * slope]
    };

    let mut raw = Vec::with_capacity(grid.len());
    let mut state = [T::zero(), cone.rho(), T::zero()];
    let mut z = T::zero();
    let mut h = None;
    let mut nodes = 0usize;
    let mut prev = T::zero();
    let mut count_nodes = |zz: T, y: &[T; 3]| {
        if zz < z_max && y[0] != T::zero() {
            if prev != T::zero() && (prev > T::zero()) != (y[0] > T::zero()) {
                nodes += 1;
            }
            prev = y[0];
        }
    };
    for &zg in grid {
        let leg = solver.integrate(rhs, z, state, zg, h, &mut count_nodes)?;
        state = leg.y;
        if leg.steps > 0 {
            h = Some(leg.h_last);
        }
        z = zg.max(z);
        raw.push(state[0]);
    }
    let leg = solver.integrate(rhs, z, state, z_max, h, &mut count_nodes)?;
    let norm = leg.y[2];
    if !norm.is_finite() || norm <= T::zero() {
        return Err(AxialError::NormalizationNonFinite);
    }
    let inv = norm.sqrt().recip();
    let samples = grid
        .iter()
        .zip(raw)
        .map(|(&zg, v)| if zg == T::zero() || zg == z_max { T::zero() } else { v * inv })
        .collect();
    Ok(AxialMode {
        channel: ChannelIndex::new(eta, cone.lambda()),
        index_n: nodes,
        c_squared,
        z_grid: grid.to_vec(),
        samples,
    })
}

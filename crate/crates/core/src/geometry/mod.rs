//! Metric, Weingarten curvature and geometric potential of a surface of
//! revolution `r(θ, z) = (f(z) cos θ, f(z) sin θ, z)`.
//!
//! The geometric potential is `U = -(ħ²/2m)(M² - K)`, which for a surface of
//! revolution reads
//!
//! ```text
//! U = -(ħ²/2m) (1 + f_z² + f f_zz)² / (4 f² (1 + f_z²)³)
//! ```
//!
//! Some printed versions of this formula square `f_zz` inside the bracket.
//! That form is dimensionally inconsistent and does not reproduce
//! `(1/4) tr(α)² - det(α)`, so it is not used here.

mod junction;
mod tabulated;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::units::KineticScale;

pub use junction::{junction_profile, JunctionGeometry, ProfileSample};
pub use tabulated::TabulatedProfile;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("z = {z} lies outside the generatrix domain [{lo}, {hi}]")]
    OutOfDomain { z: f64, lo: f64, hi: f64 },
    #[error("radius {radius} at z = {z} is not positive")]
    NonPositiveRadius { z: f64, radius: f64 },
    #[error("smooth transition eps = {transition} must be shorter than the half length a = {half_length}")]
    DegenerateTransition { transition: f64, half_length: f64 },
    #[error("invalid geometry: {0}")]
    InvalidParameter(String),
}

/// Profile curve whose revolution about the z axis generates the surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Generatrix<T> {
    /// `f(z) = rho + lambda z`, defined wherever the radius is positive.
    Cone { rho: T, lambda: T },
    Cylinder { radius: T },
    /// Piecewise junction profile, defined on the whole axis (the flat leads
    /// included).
    Junction(JunctionGeometry<T>),
    Tabulated(TabulatedProfile<T>),
}

impl<T: Scalar> Generatrix<T> {
    pub fn cone(rho: T, lambda: T) -> Result<Self, GeometryError> {
        if !(rho > T::zero()) || !(lambda > T::zero()) || !rho.is_finite() || !lambda.is_finite() {
            return Err(GeometryError::InvalidParameter(format!(
                "cone needs rho > 0 and lambda > 0 (rho={rho}, lambda={lambda})"
            )));
        }
        Ok(Generatrix::Cone { rho, lambda })
    }

    pub fn cylinder(radius: T) -> Result<Self, GeometryError> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(GeometryError::InvalidParameter(format!("cylinder radius must be positive ({radius})")));
        }
        Ok(Generatrix::Cylinder { radius })
    }

    /// Declared z-domain (closed for tabulated data).
    pub fn domain(&self) -> (T, T) {
        match self {
            Generatrix::Cone { rho, lambda } => (-*rho / *lambda, T::infinity()),
            Generatrix::Cylinder { .. } | Generatrix::Junction(_) => (T::neg_infinity(), T::infinity()),
            Generatrix::Tabulated(t) => t.domain(),
        }
    }

    /// `f`, `f_z`, `f_zz` at `z`, after checking the domain and the sign of
    /// the radius.
    pub fn profile(&self, z: T) -> Result<ProfileSample<T>, GeometryError> {
        let (lo, hi) = self.domain();
        if !z.is_finite() || z < lo || z > hi {
            return Err(GeometryError::OutOfDomain { z: z.to_f64_lossy(), lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() });
        }
        let sample = match self {
            Generatrix::Cone { rho, lambda } => ProfileSample { f: *rho + *lambda * z, f_z: *lambda, f_zz: T::zero() },
            Generatrix::Cylinder { radius } => ProfileSample { f: *radius, f_z: T::zero(), f_zz: T::zero() },
            Generatrix::Junction(j) => j.profile(z),
            Generatrix::Tabulated(t) => t.eval(z),
        };
        if !(sample.f > T::zero()) {
            return Err(GeometryError::NonPositiveRadius { z: z.to_f64_lossy(), radius: sample.f.to_f64_lossy() });
        }
        Ok(sample)
    }
}

/// Reduced metric `diag(f², 1 + f_z²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricSample<T> {
    pub g_theta_theta: T,
    pub g_zz: T,
    /// `f √(1 + f_z²)`
    pub sqrt_g: T,
}

impl<T: Scalar> MetricSample<T> {
    /// Contravariant components `(g^θθ, g^zz)`.
    pub fn inverse(&self) -> (T, T) {
        (self.g_theta_theta.recip(), self.g_zz.recip())
    }
}

/// Diagonal Weingarten tensor with its mean and Gaussian curvature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureSample<T> {
    pub alpha_11: T,
    pub alpha_22: T,
    pub mean_curvature: T,
    pub gauss_curvature: T,
}

impl<T: Scalar> CurvatureSample<T> {
    /// `(1/4) tr(α)² - det(α)`.
    pub fn potential_factor(&self) -> T {
        let tr = self.alpha_11 + self.alpha_22;
        tr * tr / T::lit(4.0) - self.alpha_11 * self.alpha_22
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricPotentialSample<T> {
    pub u: T,
}

pub fn metric_at<T: Scalar>(gen: &Generatrix<T>, z: T) -> Result<MetricSample<T>, GeometryError> {
    let p = gen.profile(z)?;
    Ok(metric_from_profile(p))
}

pub fn curvature_at<T: Scalar>(gen: &Generatrix<T>, z: T) -> Result<CurvatureSample<T>, GeometryError> {
    let p = gen.profile(z)?;
    Ok(curvature_from_profile(p))
}

pub fn geometric_potential_at<T: Scalar>(
    gen: &Generatrix<T>,
    z: T,
    scale: KineticScale<T>,
) -> Result<GeometricPotentialSample<T>, GeometryError> {
    let p = gen.profile(z)?;
    Ok(GeometricPotentialSample { u: potential_from_profile(p, scale) })
}

pub fn metric_from_profile<T: Scalar>(p: ProfileSample<T>) -> MetricSample<T> {
    let g_zz = T::one() + p.f_z * p.f_z;
    MetricSample { g_theta_theta: p.f * p.f, g_zz, sqrt_g: p.f * g_zz.sqrt() }
}

pub fn curvature_from_profile<T: Scalar>(p: ProfileSample<T>) -> CurvatureSample<T> {
    let s2 = T::one() + p.f_z * p.f_z;
    let s = s2.sqrt();
    let alpha_11 = T::one() / (p.f * s);
    let alpha_22 = -p.f_zz / (s2 * s);
    CurvatureSample {
        alpha_11,
        alpha_22,
        mean_curvature: (alpha_11 + alpha_22) / T::lit(2.0),
        gauss_curvature: alpha_11 * alpha_22,
    }
}

/// Closed form of `-(ħ²/2m)(M² - K)` in terms of the profile.
pub fn potential_from_profile<T: Scalar>(p: ProfileSample<T>, scale: KineticScale<T>) -> T {
    let s2 = T::one() + p.f_z * p.f_z;
    let num = s2 + p.f * p.f_zz;
    -scale.value() * num * num / (T::lit(4.0) * p.f * p.f * s2 * s2 * s2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::HBAR2_OVER_2ME;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn metric_examples() {
        let m = metric_at(&Generatrix::cylinder(1.0).unwrap(), 0.0).unwrap();
        assert_eq!((m.g_theta_theta, m.g_zz), (1.0, 1.0));

        let m = metric_at(&Generatrix::cone(1.0, 1.0).unwrap(), 2.0).unwrap();
        assert_eq!((m.g_theta_theta, m.g_zz), (9.0, 2.0));
        assert!(close(m.sqrt_g, 3.0 * 2f64.sqrt(), 1e-15));
        assert_eq!(m.inverse(), (1.0 / 9.0, 0.5));

        let j = JunctionGeometry::new(40.0, 2.0, 10.0, 2.0).unwrap();
        let m = metric_at(&Generatrix::Junction(j), -11.0).unwrap();
        assert_eq!((m.g_theta_theta, m.g_zz), (1600.0, 1.0));
    }

    #[test]
    fn domain_and_radius_errors() {
        let cone = Generatrix::cone(1.0, 1.0).unwrap();
        assert!(matches!(metric_at(&cone, -2.0), Err(GeometryError::OutOfDomain { .. })));
        assert!(matches!(metric_at(&cone, -1.0), Err(GeometryError::NonPositiveRadius { .. })));
        assert!(metric_at(&cone, f64::NAN).is_err());
        let tab = Generatrix::Tabulated(TabulatedProfile::from_fn(0.0, 1.0, 5, |z| 1.0 + z).unwrap());
        assert!(matches!(curvature_at(&tab, 1.5), Err(GeometryError::OutOfDomain { .. })));
        assert!(Generatrix::cone(0.0, 1.0).is_err());
        assert!(Generatrix::cone(1.0, -1.0).is_err());
        assert!(Generatrix::cylinder(-3.0).is_err());
    }

    #[test]
    fn curvature_examples() {
        let c = curvature_at(&Generatrix::cylinder(2.0).unwrap(), 7.3).unwrap();
        assert_eq!((c.alpha_11, c.alpha_22), (0.5, 0.0));
        assert_eq!(c.mean_curvature, 0.25);
        assert_eq!(c.gauss_curvature, 0.0);

        let c = curvature_at(&Generatrix::cone(1.0, 1.0).unwrap(), 0.0).unwrap();
        assert!(close(c.alpha_11, 1.0 / 2f64.sqrt(), 1e-15));
        assert_eq!(c.alpha_22, 0.0);
        assert_eq!(c.gauss_curvature, 0.0);
    }

    fn unit_sphere_error(samples: usize) -> (f64, f64) {
        let tab = TabulatedProfile::from_fn(-0.8, 0.8, samples, |z: f64| (1.0 - z * z).sqrt()).unwrap();
        // away from the equator: monotone interpolation flattens extrema
        let c = curvature_at(&Generatrix::Tabulated(tab), 0.3).unwrap();
        // both principal curvatures of the unit sphere are 1 with this normal
        ((c.mean_curvature - 1.0).abs(), (c.gauss_curvature - 1.0).abs())
    }

    #[test]
    fn tabulated_sphere_converges() {
        let mut prev = unit_sphere_error(16);
        for n in [32, 64, 128, 256, 512] {
            let e = unit_sphere_error(n);
            assert!(e.0 < prev.0 && e.1 < prev.1, "n={n} {e:?} vs {prev:?}");
            prev = e;
        }
        assert!(prev.0 < 5e-3 && prev.1 < 1e-2, "{prev:?}");
    }

    #[test]
    fn cylinder_potential_matches_lead_term() {
        let scale = KineticScale::from_mass_ratio(0.173);
        let r = 3.5;
        let u = geometric_potential_at(&Generatrix::cylinder(r).unwrap(), 1.0, scale).unwrap().u;
        let expected = -scale.value() / (4.0 * r * r);
        assert!(close(u, expected, 1e-14));
        let hbar2_over_8m = HBAR2_OVER_2ME / 0.173 / 4.0;
        assert!(close(u, -hbar2_over_8m / (r * r), 1e-14));
    }

    #[test]
    fn cone_potential_dimensionless() {
        let u = geometric_potential_at(&Generatrix::cone(1.0, 1.0).unwrap(), 0.0, KineticScale::dimensionless())
            .unwrap()
            .u;
        assert!(close(u, -0.125, 1e-15));
    }

    #[test]
    fn junction_linear_segment_potential() {
        let j = JunctionGeometry::new(40.0, 2.0, 10.0, 2.0).unwrap();
        let gen = Generatrix::Junction(j);
        let scale = KineticScale::from_mass_ratio(0.173);
        for z in [-7.9, -3.0, 0.0, 4.2, 7.99] {
            let rho = j.profile(z).f;
            let slope = 2.0 * j.transition() * j.xi();
            let expected = -scale.value() / (4.0 * rho * rho * (1.0 + slope * slope));
            let u = geometric_potential_at(&gen, z, scale).unwrap().u;
            assert!(close(u, expected, 1e-13), "z={z}");
        }
    }

    fn arbitrary_profile() -> impl Strategy<Value = ProfileSample<f64>> {
        (0.01f64..50.0, -20.0f64..20.0, -50.0f64..50.0).prop_map(|(f, f_z, f_zz)| ProfileSample { f, f_z, f_zz })
    }

    proptest! {
        #[test]
        fn potential_is_never_positive(p in arbitrary_profile(), mass in 0.01f64..2.0) {
            let u = potential_from_profile(p, KineticScale::from_mass_ratio(mass));
            prop_assert!(u <= 0.0);
        }

        #[test]
        fn closed_form_equals_curvature_route(p in arbitrary_profile()) {
            let c = curvature_from_profile(p);
            let via_trace = c.potential_factor();
            let via_mk = c.mean_curvature * c.mean_curvature - c.gauss_curvature;
            let closed = -potential_from_profile(p, KineticScale::dimensionless());
            // near-umbilic points cancel; scale by the principal curvatures
            let tol = 1e-12 * (c.alpha_11 * c.alpha_11 + c.alpha_22 * c.alpha_22);
            prop_assert!(via_mk >= -tol);
            prop_assert!((via_trace - via_mk).abs() <= tol);
            prop_assert!((closed - via_mk).abs() <= tol);
        }

        #[test]
        fn cone_potential_closed_form(rho in 0.1f64..50.0, lambda in 0.01f64..10.0, z in 0.0f64..100.0, mass in 0.01f64..1.0) {
            let scale = KineticScale::from_mass_ratio(mass);
            let gen = Generatrix::cone(rho, lambda).unwrap();
            let u = geometric_potential_at(&gen, z, scale).unwrap().u;
            let f = rho + lambda * z;
            let expected = -scale.value() / (4.0 * f * f * (1.0 + lambda * lambda));
            prop_assert!((u - expected).abs() <= 1e-12 * expected.abs());
        }

        #[test]
        fn junction_potential_sign(r1 in 0.5f64..60.0, r2 in 0.5f64..60.0, a in 1.0f64..30.0, frac in 0.05f64..0.95, t in -1.2f64..1.2) {
            let j = JunctionGeometry::new(r1, r2, a, frac * a).unwrap();
            let u = geometric_potential_at(&Generatrix::Junction(j), t * a, KineticScale::from_mass_ratio(0.173)).unwrap().u;
            prop_assert!(u <= 0.0);
        }
    }
}

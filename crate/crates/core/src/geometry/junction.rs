//! Radius profile of a truncated-cone junction between two coaxial cylinders.
//!
//! The profile is flat at `R1` for `z <= -a`, follows a parabola over the
//! first `eps` of the junction, a straight line through the middle, a second
//! parabola over the last `eps`, and is flat at `R2` for `z > a`. The parabola
//! coefficient `xi = (R1 - R2) / (4 eps a - 2 eps^2)` makes the slope
//! continuous; the curvature jumps at the four branch points.

use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JunctionGeometry<T> {
    r1: T,
    r2: T,
    half_length: T,
    transition: T,
    xi: T,
}

/// Radius and its first two derivatives at one axial position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileSample<T> {
    pub f: T,
    pub f_z: T,
    pub f_zz: T,
}

impl<T: Scalar> JunctionGeometry<T> {
    /// `r1`/`r2` are the incoming/outgoing cylinder radii, `half_length` is `a`
    /// (the junction spans `[-a, a]`) and `transition` is the parabolic cap
    /// length `eps`.
    pub fn new(r1: T, r2: T, half_length: T, transition: T) -> Result<Self, GeometryError> {
        let finite = [r1, r2, half_length, transition].iter().all(|v| v.is_finite());
        if !finite {
            return Err(GeometryError::InvalidParameter("junction parameters must be finite".into()));
        }
        if r1 <= T::zero() || r2 <= T::zero() {
            return Err(GeometryError::InvalidParameter(format!(
                "junction radii must be positive (R1={r1}, R2={r2})"
            )));
        }
        if transition <= T::zero() {
            return Err(GeometryError::InvalidParameter(format!(
                "transition length must be positive (eps={transition})"
            )));
        }
        if transition >= half_length {
            return Err(GeometryError::DegenerateTransition {
                transition: transition.to_f64_lossy(),
                half_length: half_length.to_f64_lossy(),
            });
        }
        let two = T::lit(2.0);
        let xi = (r1 - r2) / (T::lit(4.0) * transition * half_length - two * transition * transition);
        Ok(JunctionGeometry { r1, r2, half_length, transition, xi })
    }

    pub fn r1(&self) -> T {
        self.r1
    }
    pub fn r2(&self) -> T {
        self.r2
    }
    pub fn half_length(&self) -> T {
        self.half_length
    }
    pub fn transition(&self) -> T {
        self.transition
    }
    pub fn xi(&self) -> T {
        self.xi
    }

    /// The same junction seen from the other end (`z -> -z`, radii swapped).
    pub fn mirrored(&self) -> Self {
        Self::new(self.r2, self.r1, self.half_length, self.transition).expect("mirror of a valid junction")
    }

    /// Axial positions where the curvature of the profile jumps.
    pub fn branch_points(&self) -> [T; 4] {
        let a = self.half_length;
        let e = self.transition;
        [-a, -a + e, a - e, a]
    }

    /// Evaluates the five-branch profile.
    pub fn profile(&self, z: T) -> ProfileSample<T> {
        let a = self.half_length;
        let e = self.transition;
        let xi = self.xi;
        let two = T::lit(2.0);
        if z <= -a {
            ProfileSample { f: self.r1, f_z: T::zero(), f_zz: T::zero() }
        } else if z <= -a + e {
            let d = z + a;
            ProfileSample { f: self.r1 - xi * d * d, f_z: -two * xi * d, f_zz: -two * xi }
        } else if z <= a - e {
            ProfileSample {
                f: -two * e * xi * z + (self.r1 + self.r2) / two,
                f_z: -two * e * xi,
                f_zz: T::zero(),
            }
        } else if z <= a {
            let d = z - a;
            ProfileSample { f: xi * d * d + self.r2, f_z: two * xi * d, f_zz: two * xi }
        } else {
            ProfileSample { f: self.r2, f_z: T::zero(), f_zz: T::zero() }
        }
    }
}

/// `(rho, rho', rho'')` of the junction profile at `z`.
pub fn junction_profile<T: Scalar>(junction: &JunctionGeometry<T>, z: T) -> (T, T, T) {
    let s = junction.profile(z);
    (s.f, s.f_z, s.f_zz)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig6() -> JunctionGeometry<f64> {
        JunctionGeometry::new(40.0, 2.0, 10.0, 2.0).unwrap()
    }

    #[test]
    fn flat_at_left_end() {
        let (r, d, _) = junction_profile(&fig6(), -10.0);
        assert_eq!(r, 40.0);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn midpoint_of_linear_branch() {
        let j = fig6();
        assert!((j.xi() - 38.0 / 72.0).abs() < 1e-15);
        let (r, d, dd) = junction_profile(&j, 0.0);
        assert!((r - 21.0).abs() < 1e-12);
        assert!((d + 2.0 * 2.0 * 38.0 / 72.0).abs() < 1e-12);
        assert!((d + 2.111_111_111_111).abs() < 1e-9);
        assert_eq!(dd, 0.0);
    }

    #[test]
    fn equal_radii_is_a_cylinder() {
        let j = JunctionGeometry::new(5.0, 5.0, 10.0, 2.0).unwrap();
        for z in [-12.0, -9.5, -3.0, 0.0, 8.7, 9.9, 15.0] {
            assert_eq!(junction_profile(&j, z), (5.0, 0.0, 0.0));
        }
    }

    #[test]
    fn rejects_transition_not_shorter_than_half_length() {
        assert!(matches!(
            JunctionGeometry::new(40.0, 2.0, 10.0, 12.0),
            Err(GeometryError::DegenerateTransition { .. })
        ));
        assert!(JunctionGeometry::new(40.0, 2.0, 10.0, 10.0).is_err());
        assert!(JunctionGeometry::new(-1.0, 2.0, 10.0, 2.0).is_err());
    }

    #[test]
    fn continuity_at_branch_points() {
        for (r1, r2, a, e) in [(40.0f64, 2.0, 10.0, 2.0), (30.0, 3.0, 10.0, 0.5), (3.0, 12.0, 7.0, 5.5)] {
            let j = JunctionGeometry::new(r1, r2, a, e).unwrap();
            for zb in j.branch_points() {
                let dz = 1e-9 * a;
                let left = j.profile(zb - dz);
                let right = j.profile(zb + dz);
                let scale = r1.max(r2);
                assert!((left.f - right.f).abs() < 1e-7 * scale, "rho jump at {zb}");
                assert!((left.f_z - right.f_z).abs() < 1e-7, "rho' jump at {zb}");
            }
            let [b0, b1, b2, b3] = j.branch_points();
            let xi = j.xi();
            let eps = 1e-6;
            assert_eq!(j.profile(b0 - eps).f_zz, 0.0);
            assert!((j.profile(b0 + eps).f_zz + 2.0 * xi).abs() < 1e-12);
            assert!((j.profile(b1 - eps).f_zz + 2.0 * xi).abs() < 1e-12);
            assert_eq!(j.profile(b1 + eps).f_zz, 0.0);
            assert_eq!(j.profile(b2 - eps).f_zz, 0.0);
            assert!((j.profile(b2 + eps).f_zz - 2.0 * xi).abs() < 1e-12);
            assert!((j.profile(b3 - eps).f_zz - 2.0 * xi).abs() < 1e-12);
            assert_eq!(j.profile(b3 + eps).f_zz, 0.0);
        }
    }

    #[test]
    fn mirrored_profile_is_reflection() {
        let j = JunctionGeometry::new(30.0, 3.0, 10.0, 1.0).unwrap();
        let m = j.mirrored();
        for i in 0..=200 {
            let z = -12.0 + 24.0 * i as f64 / 200.0;
            let p = j.profile(z);
            let q = m.profile(-z);
            assert!((p.f - q.f).abs() < 1e-12);
            assert!((p.f_z + q.f_z).abs() < 1e-12);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let j = JunctionGeometry::<f32>::new(40.0, 2.0, 10.0, 2.0).unwrap();
        let (r, _, _) = junction_profile(&j, 0.0);
        assert!((r - 21.0).abs() < 1e-4);
    }
}

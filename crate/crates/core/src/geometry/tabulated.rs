//! Monotone C¹ cubic Hermite interpolation (Fritsch–Carlson slopes) of a
//! sampled radius profile, differentiated analytically.

use serde::{Deserialize, Serialize};

use super::junction::ProfileSample;
use super::GeometryError;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabulatedProfile<T> {
    z: Vec<T>,
    f: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Scalar> TabulatedProfile<T> {
    pub fn new(z: Vec<T>, f: Vec<T>) -> Result<Self, GeometryError> {
        if z.len() != f.len() {
            return Err(GeometryError::InvalidParameter(format!(
                "tabulated profile has {} abscissae but {} radii",
                z.len(),
                f.len()
            )));
        }
        if z.len() < 4 {
            return Err(GeometryError::InvalidParameter("tabulated profile needs at least 4 samples".into()));
        }
        if z.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GeometryError::InvalidParameter("tabulated abscissae must be strictly increasing".into()));
        }
        if let Some((zi, fi)) = z.iter().zip(&f).find(|(_, fi)| !(**fi > T::zero())) {
            return Err(GeometryError::NonPositiveRadius { z: zi.to_f64_lossy(), radius: fi.to_f64_lossy() });
        }
        let slopes = fritsch_carlson_slopes(&z, &f);
        Ok(TabulatedProfile { z, f, slopes })
    }

    /// Samples `profile` at `n` uniformly spaced points on `[lo, hi]`.
    pub fn from_fn(lo: T, hi: T, n: usize, profile: impl Fn(T) -> T) -> Result<Self, GeometryError> {
        let step = (hi - lo) / T::from_usize_lossy(n.max(2) - 1);
        let z: Vec<T> = (0..n).map(|i| lo + step * T::from_usize_lossy(i)).collect();
        let f = z.iter().map(|&x| profile(x)).collect();
        Self::new(z, f)
    }

    pub fn domain(&self) -> (T, T) {
        (self.z[0], self.z[self.z.len() - 1])
    }

    /// Interpolant and its first two derivatives. `z` must lie in the domain.
    pub fn eval(&self, z: T) -> ProfileSample<T> {
        let n = self.z.len();
        // index of the interval [z_i, z_{i+1}] containing z
        let i = match self.z.binary_search_by(|probe| probe.partial_cmp(&z).expect("finite abscissa")) {
            Ok(k) => k.min(n - 2),
            Err(k) => k.saturating_sub(1).min(n - 2),
        };
        let h = self.z[i + 1] - self.z[i];
        let t = (z - self.z[i]) / h;
        let (y0, y1) = (self.f[i], self.f[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let one = T::one();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let six = T::lit(6.0);
        let t2 = t * t;
        let t3 = t2 * t;

        let h00 = two * t3 - three * t2 + one;
        let h10 = t3 - two * t2 + t;
        let h01 = -two * t3 + three * t2;
        let h11 = t3 - t2;
        let f = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;

        let d00 = six * t2 - six * t;
        let d10 = three * t2 - T::lit(4.0) * t + one;
        let d01 = -d00;
        let d11 = three * t2 - two * t;
        let f_z = (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / h;

        let s00 = T::lit(12.0) * t - six;
        let s10 = six * t - T::lit(4.0);
        let s01 = -s00;
        let s11 = six * t - two;
        let f_zz = (s00 * y0 + s10 * m0 + s01 * y1 + s11 * m1) / (h * h);

        ProfileSample { f, f_z, f_zz }
    }
}

// Same slope rules as scipy's PchipInterpolator: weighted harmonic mean in the
// interior, a one-sided three-point estimate at the ends.
fn fritsch_carlson_slopes<T: Scalar>(z: &[T], f: &[T]) -> Vec<T> {
    let n = z.len();
    let h: Vec<T> = z.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<T> = (0..n - 1).map(|i| (f[i + 1] - f[i]) / h[i]).collect();
    let mut m = vec![T::zero(); n];
    let two = T::lit(2.0);
    for k in 1..n - 1 {
        let (d0, d1) = (delta[k - 1], delta[k]);
        if d0 * d1 <= T::zero() {
            m[k] = T::zero();
        } else {
            let w1 = two * h[k] + h[k - 1];
            let w2 = h[k] + two * h[k - 1];
            m[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
        }
    }
    m[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    m
}

fn end_slope<T: Scalar>(h0: T, h1: T, d0: T, d1: T) -> T {
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let d = ((two * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        T::zero()
    } else if d0.signum() != d1.signum() && d.abs() > (three * d0).abs() {
        three * d0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_samples_and_is_c1() {
        let p = TabulatedProfile::from_fn(0.0, 3.0, 31, |z: f64| 2.0 + (z).sin()).unwrap();
        for (zi, fi) in p.z.iter().zip(&p.f) {
            assert!((p.eval(*zi).f - fi).abs() < 1e-14);
        }
        for &zi in &p.z[1..30] {
            let l = p.eval(zi - 1e-10);
            let r = p.eval(zi + 1e-10);
            assert!((l.f_z - r.f_z).abs() < 1e-7);
        }
    }

    #[test]
    fn exact_for_linear_data() {
        let p = TabulatedProfile::from_fn(0.0, 2.0, 9, |z: f64| 1.0 + 0.5 * z).unwrap();
        let s = p.eval(1.37);
        assert!((s.f - 1.685).abs() < 1e-14);
        assert!((s.f_z - 0.5).abs() < 1e-14);
        assert!(s.f_zz.abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(TabulatedProfile::new(vec![0.0, 1.0, 2.0], vec![1.0, 1.0, 1.0]).is_err());
        assert!(TabulatedProfile::new(vec![0.0, 1.0, 1.0, 2.0], vec![1.0; 4]).is_err());
        assert!(TabulatedProfile::new(vec![0.0, 1.0, 2.0, 3.0], vec![1.0, 0.0, 1.0, 1.0]).is_err());
    }
}

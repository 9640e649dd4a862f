//! Tridiagonal kernels: Sturm-count bisection for symmetric eigenvalues and a
//! partially pivoted LU solve for general (complex) systems.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("singular tridiagonal system at row {row} (pivot ratio {pivot_ratio:.3e})")]
    Singular { row: usize, pivot_ratio: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("requested eigenvalue index {index} but the matrix has order {order}")]
    IndexOutOfRange { index: usize, order: usize },
}

/// Number of eigenvalues of the symmetric tridiagonal matrix `(diag, off)`
/// that are strictly less than `x`.
pub fn sturm_count<T: Scalar>(diag: &[T], off: &[T], x: T) -> usize {
    let tiny = T::min_positive_value().sqrt();
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < T::zero() {
        count += 1;
    }
    for i in 1..diag.len() {
        let qq = if q.abs() < tiny { tiny.copysign(q) } else { q };
        q = diag[i] - x - off[i - 1] * off[i - 1] / qq;
        if q < T::zero() {
            count += 1;
        }
    }
    count
}

/// The `count` smallest eigenvalues of a symmetric tridiagonal matrix, in
/// ascending order, by bisection on the Sturm count.
pub fn symmetric_tridiagonal_lowest<T: Scalar>(diag: &[T], off: &[T], count: usize) -> Result<Vec<T>, LinalgError> {
    let n = diag.len();
    if off.len() + 1 != n {
        return Err(LinalgError::Dimension(format!("diag {} vs off-diagonal {}", n, off.len())));
    }
    if count > n {
        return Err(LinalgError::IndexOutOfRange { index: count - 1, order: n });
    }
    // Gershgorin bounds
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { T::zero() } + if i + 1 < n { off[i].abs() } else { T::zero() };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let two = T::lit(2.0);
    let span = (hi - lo).abs().max(T::one());
    let tol = T::epsilon() * two * span;
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let (mut a, mut b) = (lo, hi);
        if let Some(&prev) = out.last() {
            a = a.max(prev);
        }
        for _ in 0..200 {
            let mid = (a + b) / two;
            if sturm_count(diag, off, mid) > k {
                b = mid;
            } else {
                a = mid;
            }
            if b - a <= tol + T::epsilon() * (a.abs() + b.abs()) {
                break;
            }
        }
        out.push((a + b) / two);
    }
    Ok(out)
}

/// Outcome of a tridiagonal solve.
#[derive(Clone, Debug)]
pub struct TridiagonalSolution<T> {
    pub x: Vec<Complex<T>>,
    /// `min |pivot| / max |pivot|` of the elimination, a cheap conditioning
    /// indicator.
    pub pivot_ratio: T,
}

/// Solves `A x = b` for tridiagonal `A` with sub-diagonal `lower[i] = A[i+1][i]`,
/// diagonal `diag[i] = A[i][i]` and super-diagonal `upper[i] = A[i][i+1]`.
/// Gaussian elimination with partial pivoting (the LAPACK `gtsv` scheme).
pub fn solve_tridiagonal<T: Scalar>(
    lower: &[Complex<T>],
    diag: &[Complex<T>],
    upper: &[Complex<T>],
    rhs: &[Complex<T>],
) -> Result<TridiagonalSolution<T>, LinalgError> {
    let n = diag.len();
    if n == 0 || lower.len() + 1 != n || upper.len() + 1 != n || rhs.len() != n {
        return Err(LinalgError::Dimension(format!(
            "n={n}, lower={}, upper={}, rhs={}",
            lower.len(),
            upper.len(),
            rhs.len()
        )));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut d = diag.to_vec();
    let mut du = upper.to_vec();
    let mut dl = lower.to_vec();
    // second super-diagonal created by row swaps
    let mut du2 = vec![zero; n.saturating_sub(2)];
    let mut b = rhs.to_vec();
    let mut max_piv = T::zero();
    let mut min_piv = T::infinity();

    for i in 0..n - 1 {
        if d[i].norm() >= dl[i].norm() {
            if d[i].norm() == T::zero() {
                return Err(LinalgError::Singular { row: i, pivot_ratio: 0.0 });
            }
            let m = dl[i] / d[i];
            d[i + 1] = d[i + 1] - m * du[i];
            b[i + 1] = b[i + 1] - m * b[i];
            dl[i] = m;
        } else {
            let m = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - m * tmp;
            if i + 1 < n - 1 {
                du2[i] = du[i + 1];
                du[i + 1] = -m * du2[i];
            }
            du[i] = tmp;
            b.swap(i, i + 1);
            b[i + 1] = b[i + 1] - m * b[i];
            dl[i] = m;
        }
        let p = d[i].norm();
        max_piv = max_piv.max(p);
        min_piv = min_piv.min(p);
    }
    let p = d[n - 1].norm();
    max_piv = max_piv.max(p);
    min_piv = min_piv.min(p);
    let ratio = if max_piv > T::zero() { min_piv / max_piv } else { T::zero() };
    if p == T::zero() || ratio < T::epsilon() {
        let row = d.iter().position(|v| v.norm() == min_piv).unwrap_or(n - 1);
        return Err(LinalgError::Singular { row, pivot_ratio: ratio.to_f64_lossy() });
    }

    // back substitution
    let mut x = b;
    x[n - 1] = x[n - 1] / d[n - 1];
    if n > 1 {
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    Ok(TridiagonalSolution { x, pivot_ratio: ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_eigenvalues() {
        // -u'' on (0, pi) with n interior points: 2/h^2 (1 - cos(k pi/(n+1)))
        let n = 400;
        let h = std::f64::consts::PI / (n + 1) as f64;
        let diag = vec![2.0 / (h * h); n];
        let off = vec![-1.0 / (h * h); n - 1];
        let ev = symmetric_tridiagonal_lowest(&diag, &off, 4).unwrap();
        for (k, e) in ev.iter().enumerate() {
            let m = (k + 1) as f64;
            let exact = 2.0 / (h * h) * (1.0 - (m * std::f64::consts::PI / (n + 1) as f64).cos());
            assert!((e - exact).abs() < 1e-9 * exact, "{k}: {e} vs {exact}");
        }
        assert!(symmetric_tridiagonal_lowest(&diag, &off[1..], 1).is_err());
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn solves_against_dense_product() {
        let n = 7;
        let lower: Vec<_> = (0..n - 1).map(|i| c(1.0 + i as f64, -0.5)).collect();
        // zero leading diagonal forces a row swap
        let mut diag: Vec<_> = (0..n).map(|i| c(0.3 * i as f64, 0.2)).collect();
        diag[0] = c(0.0, 0.0);
        let upper: Vec<_> = (0..n - 1).map(|i| c(2.0, 0.1 * i as f64)).collect();
        let x_true: Vec<_> = (0..n).map(|i| c(i as f64 - 3.0, 1.0 / (i + 1) as f64)).collect();
        let mut b = vec![c(0.0, 0.0); n];
        for i in 0..n {
            b[i] = diag[i] * x_true[i];
            if i > 0 {
                b[i] = b[i] + lower[i - 1] * x_true[i - 1];
            }
            if i + 1 < n {
                b[i] = b[i] + upper[i] * x_true[i + 1];
            }
        }
        let sol = solve_tridiagonal(&lower, &diag, &upper, &b).unwrap();
        for (a, e) in sol.x.iter().zip(&x_true) {
            assert!((a - e).norm() < 1e-12, "{a} vs {e}");
        }
    }

    #[test]
    fn singular_system_is_reported() {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let r = solve_tridiagonal(&[one], &[one, one], &[one], &[one, z]);
        assert!(matches!(r, Err(LinalgError::Singular { .. })));
    }
}

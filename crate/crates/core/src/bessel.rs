//! Cylinder functions `J_ν`, `Y_ν` of complex order and real argument by
//! power series. Only meant for moderate arguments (|x| ≲ 20), where the
//! series is accurate to roughly 1e-9 relative or better.
//!
//! On the truncated cone the axial solutions are `J_δ`, `Y_δ` of the argument
//! `c √(1+λ²)/λ · (1 + λ z/ρ)`, with `δ` purely imaginary for `η = 0`. These
//! routines give a closed-form route to the spectrum and the eigenfunctions
//! that is independent of the ODE solver.

use num_complex::Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(z) for complex `z` (Lanczos approximation with reflection).
pub fn gamma(z: Complex64) -> Complex64 {
    let pi = std::f64::consts::PI;
    if z.re < 0.5 {
        // Γ(z) Γ(1-z) = π / sin(πz)
        return pi / ((pi * z).sin() * gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * pi).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// `J_ν(x)` for `x > 0`.
pub fn bessel_j(nu: Complex64, x: f64) -> Complex64 {
    assert!(x > 0.0, "argument must be positive");
    let half = x / 2.0;
    let q = -half * half;
    let mut term = (nu * half.ln()).exp() / gamma(nu + 1.0);
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + nu));
        sum += term;
        if k > half && term.norm() <= 1e-17 * sum.norm() {
            break;
        }
        k += 1.0;
        if k > 500.0 {
            break;
        }
    }
    sum
}

/// `Y_ν(x) = (J_ν(x) cos νπ - J_{-ν}(x)) / sin νπ` for non-integer `ν`.
pub fn bessel_y(nu: Complex64, x: f64) -> Complex64 {
    let pi = std::f64::consts::PI;
    let s = (nu * pi).sin();
    assert!(s.norm() > 1e-12, "Y_nu via reflection needs non-integer order");
    (bessel_j(nu, x) * (nu * pi).cos() - bessel_j(-nu, x)) / s
}

/// Bessel argument `x(z) = c √(1+λ²)/λ · (1 + λ z/ρ)` on the cone.
pub fn cone_argument(c: f64, lambda: f64, rho: f64, z: f64) -> f64 {
    c * (1.0 + lambda * lambda).sqrt() / lambda * (1.0 + lambda * z / rho)
}

/// Cross product `Y_δ(x₀) J_δ(x₁) - J_δ(x₀) Y_δ(x₁)` whose zeros in `c` are
/// the hard-wall eigenvalues of a cone of height `z_max`. Real up to
/// round-off; the real part is returned.
pub fn secular_function(c: f64, eta: i64, lambda: f64, rho: f64, z_max: f64) -> f64 {
    let delta = order(eta, lambda);
    let x0 = cone_argument(c, lambda, rho, 0.0);
    let x1 = cone_argument(c, lambda, rho, z_max);
    let v = bessel_y(delta, x0) * bessel_j(delta, x1) - bessel_j(delta, x0) * bessel_y(delta, x1);
    v.re
}

/// Ratio `J_δ(x₀)/Y_δ(x₀)` that cancels the boundary value at `z = 0`.
pub fn boundary_ratio(c: f64, eta: i64, lambda: f64, rho: f64) -> Complex64 {
    let delta = order(eta, lambda);
    let x0 = cone_argument(c, lambda, rho, 0.0);
    bessel_j(delta, x0) / bessel_y(delta, x0)
}

/// Unnormalized closed-form eigenfunction `J_δ(x(z)) - (J_δ(x₀)/Y_δ(x₀)) Y_δ(x(z))`.
pub fn cone_eigenfunction(c: f64, eta: i64, lambda: f64, rho: f64, z: f64) -> Complex64 {
    let delta = order(eta, lambda);
    let ratio = boundary_ratio(c, eta, lambda, rho);
    let x = cone_argument(c, lambda, rho, z);
    bessel_j(delta, x) - ratio * bessel_y(delta, x)
}

fn order(eta: i64, lambda: f64) -> Complex64 {
    crate::axial::order_delta(eta, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        assert!((gamma(Complex64::new(5.0, 0.0)).re - 24.0).abs() < 1e-12);
        assert!((gamma(Complex64::new(0.5, 0.0)).re - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        // |Γ(i/2)|² = π / ((1/2) sinh(π/2))
        let g = gamma(Complex64::new(0.0, 0.5));
        let expected = std::f64::consts::PI / (0.5 * (std::f64::consts::PI / 2.0).sinh());
        assert!((g.norm_sqr() - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn integer_and_half_integer_orders() {
        // J_0(2.4048255576957728) = 0
        assert!(bessel_j(Complex64::new(0.0, 0.0), 2.404_825_557_695_773).norm() < 1e-14);
        // J_{1/2}(x) = sqrt(2/(pi x)) sin x, Y_{1/2}(x) = -sqrt(2/(pi x)) cos x
        for x in [0.3, 1.7, 6.0, 12.5] {
            let pref = (2.0 / (std::f64::consts::PI * x)).sqrt();
            let j = bessel_j(Complex64::new(0.5, 0.0), x);
            let y = bessel_y(Complex64::new(0.5, 0.0), x);
            assert!((j.re - pref * x.sin()).abs() < 1e-11, "J x={x}");
            assert!((y.re + pref * x.cos()).abs() < 1e-11, "Y x={x}");
        }
    }

    #[test]
    fn imaginary_order_wronskian() {
        // W[J_ν, Y_ν](x) = 2/(πx) for any order
        let nu = Complex64::new(0.0, 0.5);
        for x in [0.8, 2.0, 5.5] {
            let dx = 1e-5;
            let dj = (bessel_j(nu, x + dx) - bessel_j(nu, x - dx)) / (2.0 * dx);
            let dy = (bessel_y(nu, x + dx) - bessel_y(nu, x - dx)) / (2.0 * dx);
            let w = bessel_j(nu, x) * dy - bessel_y(nu, x) * dj;
            let expected = 2.0 / (std::f64::consts::PI * x);
            assert!((w.re - expected).abs() < 1e-8 && w.im.abs() < 1e-8, "x={x}: {w}");
        }
    }
}

//! Constants of Euclidean geometry used across the crate.

use std::f64::consts::PI;

/// `Gamma(k / 2)` for a positive integer `k`, exact by recursion.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k > 0, "gamma_half needs k >= 1");
    let (mut acc, mut x) = if k % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = k as f64 / 2.0;
    while x < target - 0.25 {
        acc *= x;
        x += 1.0;
    }
    acc
}

/// Volume of the unit ball in `R^n`.
pub fn omega(n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    PI.powf(n as f64 / 2.0) / gamma_half(n as u32 + 2)
}

/// Surface measure of the unit sphere `S^k` in `R^{k+1}`.
pub fn sphere_area(k: usize) -> f64 {
    2.0 * PI.powf((k as f64 + 1.0) / 2.0) / gamma_half(k as u32 + 1)
}

/// Lipschitz constant `c_{n,alpha} = 2 n omega_n^{alpha/n} / (n - alpha)`.
pub fn c_n_alpha(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    2.0 * nf * omega(n).powf(alpha / nf) / (nf - alpha)
}

/// Potential of the ball of radius `r` at its center, `n omega_n r^{n-alpha} / (n - alpha)`.
pub fn ball_center_potential(n: usize, alpha: f64, r: f64) -> f64 {
    let nf = n as f64;
    nf * omega(n) * r.powf(nf - alpha) / (nf - alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert!((omega(1) - 2.0).abs() < 1e-15);
        assert!((omega(2) - PI).abs() < 1e-15);
        assert!((omega(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((omega(4) - PI * PI / 2.0).abs() < 1e-14);
        assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn lipschitz_constant_planar_unit_exponent() {
        assert!((c_n_alpha(2, 1.0) - 4.0 * PI.sqrt()).abs() < 1e-14);
    }
}

//! Riesz potential and interaction energy of balls in any dimension.

use crate::quadrature::{adaptive, AdaptiveTol, Estimate};
use crate::special::sphere_area;
use std::f64::consts::PI;

/// `v_{B_rho}(x)` with `r = |x - c|`, by integrating exact ray lengths over
/// the polar angle from the axis through the center.
pub fn ball_potential(n: usize, rho: f64, r: f64, alpha: f64, rel_tol: f64) -> Estimate {
    let nf = n as f64;
    let q = nf - alpha;
    let shell = if n >= 2 { sphere_area(n - 2) } else { 1.0 };
    let tol = AdaptiveTol { rel: rel_tol, abs: 1e-300, max_panels: 400 };
    let sin_pow = |phi: f64| if n == 2 { 1.0 } else { phi.sin().powi(n as i32 - 2) };
    if r < rho * (1.0 - 1e-14) {
        // phi measured from the direction pointing away from the center.
        let g = |phi: f64| {
            let c = phi.cos();
            let s = phi.sin();
            let len = -r * c + (rho * rho - r * r * s * s).max(0.0).sqrt();
            sin_pow(phi) * len.powf(q) / q
        };
        let mut est = adaptive(g, 0.0, PI, &[], tol);
        if n == 2 {
            // The two half-planes of directions.
            est = est.scale(2.0);
        } else {
            est = est.scale(shell);
        }
        est
    } else {
        let beta = (rho / r).min(1.0).asin();
        // psi = angle to the direction of the center, psi = beta sin(s).
        let g = |s: f64| {
            let psi = beta * s.sin();
            let c = psi.cos();
            let disc = (rho * rho - r * r * psi.sin().powi(2)).max(0.0).sqrt();
            let (r1, r2) = ((r * c - disc).max(0.0), r * c + disc);
            sin_pow(psi) * (r2.powf(q) - r1.powf(q)) / q * beta * s.cos()
        };
        let est = adaptive(g, 0.0, 0.5 * PI, &[], tol);
        est.scale(if n == 2 { 2.0 } else { shell })
    }
}

/// `V(B_rho) = int_0^rho v(r) |S^{n-1}| r^{n-1} dr`.
pub fn ball_interaction(n: usize, rho: f64, alpha: f64, rel_tol: f64) -> Estimate {
    let area = sphere_area(n - 1);
    let mut err = 0.0;
    let tol = AdaptiveTol { rel: rel_tol, abs: 0.0, max_panels: 200 };
    let inner_tol = (0.1 * rel_tol).max(1e-15);
    let est = adaptive(
        |r| {
            let v = ball_potential(n, rho, r, alpha, inner_tol);
            err += v.error * r.powi(n as i32 - 1) * area;
            area * r.powi(n as i32 - 1) * v.value
        },
        0.0,
        rho,
        &[],
        tol,
    );
    Estimate { value: est.value, error: est.error + err * rho / 30.0, converged: est.converged }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ball_center_potential;

    #[test]
    fn center_values() {
        for (n, alpha, rho) in [(2, 0.5, 1.0), (3, 1.0, 0.7), (4, 2.5, 1.3)] {
            let v = ball_potential(n, rho, 0.0, alpha, 1e-13).value;
            let exact = ball_center_potential(n, alpha, rho);
            assert!((v - exact).abs() < 1e-11 * exact, "{n} {v} {exact}");
        }
    }

    #[test]
    fn zero_exponent_is_volume() {
        // alpha = 0: v = |B| wherever x is.
        for r in [0.0, 0.4, 1.0, 2.5] {
            let v = ball_potential(3, 1.0, r, 0.0, 1e-13).value;
            assert!((v - 4.0 * PI / 3.0).abs() < 1e-10, "{r} {v}");
        }
        let v = ball_interaction(2, 1.0, 0.0, 1e-12).value;
        assert!((v - PI * PI).abs() < 1e-9);
    }

    #[test]
    fn newtonian_potential_outside() {
        // n = 3, alpha = 1: v(x) = |B| / |x| outside.
        let v = ball_potential(3, 1.0, 3.0, 1.0, 1e-13).value;
        assert!((v - 4.0 * PI / 9.0).abs() < 1e-10, "{v}");
    }
}

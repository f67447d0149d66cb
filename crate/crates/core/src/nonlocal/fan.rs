//! Radial-fan integration of `int_E k(y - x) dy` around a center `x`.
//!
//! In polar coordinates about `x` the radial integral of the kernel is
//! closed-form, leaving a one-dimensional integral over the boundary. Each
//! polygon edge contributes the signed angular sweep it subtends.

use crate::anisotropy::SurfaceTension;
use crate::geometry::{self, P2};
use crate::quadrature::{adaptive, AdaptiveTol, Estimate};
use std::f64::consts::PI;

/// Kernels `k(z)` with an analytic radial primitive in the plane.
#[derive(Debug, Clone, Copy)]
pub enum Kernel<'a> {
    /// `|z|^{-alpha}`.
    Riesz { alpha: f64 },
    /// `f_*(z)^p` with `p > -2`.
    DualPower { f: &'a SurfaceTension, p: f64 },
    /// `log f_*(z)`.
    DualLog { f: &'a SurfaceTension },
}

impl Kernel<'_> {
    /// `int_0^r k(rho e) rho d rho` for a unit direction `e`.
    #[inline]
    pub fn radial_primitive(&self, e: P2, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match *self {
            Kernel::Riesz { alpha } => r.powf(2.0 - alpha) / (2.0 - alpha),
            Kernel::DualPower { f, p } => f.dual2(e).powf(p) * r.powf(2.0 + p) / (2.0 + p),
            Kernel::DualLog { f } => {
                let r2 = r * r;
                0.5 * r2 * f.dual2(e).ln() + 0.5 * r2 * r.ln() - 0.25 * r2
            }
        }
    }

    /// Pointwise value `k(z)`.
    #[inline]
    pub fn value(&self, z: P2) -> f64 {
        match *self {
            Kernel::Riesz { alpha } => geometry::norm(z).powf(-alpha),
            Kernel::DualPower { f, p } => f.dual2(z).powf(p),
            Kernel::DualLog { f } => f.dual2(z).ln(),
        }
    }

    /// Unit directions across which the angular factor is not smooth.
    pub fn kinks(&self) -> Vec<P2> {
        match *self {
            Kernel::Riesz { .. } => Vec::new(),
            Kernel::DualPower { f, .. } | Kernel::DualLog { f } => f.dual_kinks(),
        }
    }

    /// Whether the kernel integrates a positive singularity at the center.
    pub fn is_singular(&self) -> bool {
        match *self {
            Kernel::Riesz { .. } => true,
            Kernel::DualPower { p, .. } => p < 0.0,
            Kernel::DualLog { .. } => true,
        }
    }
}

/// Signed contribution of the edge `a -> b` to the fan integral about `x`.
pub fn edge_contribution(kernel: &Kernel, kinks: &[P2], x: P2, a: P2, b: P2, tol: AdaptiveTol) -> Estimate {
    let pa = geometry::sub(a, x);
    let pb = geometry::sub(b, x);
    let d_ab = geometry::sub(pb, pa);
    let len = geometry::norm(d_ab);
    let reach = geometry::norm(pa).max(geometry::norm(pb));
    if len == 0.0 || reach == 0.0 {
        return Estimate::exact(0.0);
    }
    let t = geometry::scale(d_ab, 1.0 / len);
    let sa = geometry::dot(pa, t);
    let sb = sa + len;
    let foot = geometry::sub(pa, geometry::scale(t, sa));
    let d = geometry::norm(foot);
    if d <= 1e-13 * reach {
        // The edge line passes through the center: zero angular sweep.
        return Estimate::exact(0.0);
    }
    let nrm = geometry::scale(foot, 1.0 / d);
    let sigma = geometry::cross(nrm, t).signum();
    let ua = (sa / d).asinh();
    let ub = (sb / d).asinh();
    let breaks: Vec<f64> = kinks
        .iter()
        .filter_map(|k| {
            let kn = geometry::dot(*k, nrm);
            (kn > 0.0).then(|| (geometry::dot(*k, t) / kn).asinh())
        })
        .collect();
    let integrand = |u: f64| {
        let (sh, ch) = (u.sinh(), u.cosh());
        let e = [(nrm[0] + sh * t[0]) / ch, (nrm[1] + sh * t[1]) / ch];
        kernel.radial_primitive(e, d * ch) / ch
    };
    let scale_abs = (kernel.radial_primitive(nrm, reach).abs() + kernel.radial_primitive(nrm, d).abs()) * 1e-15;
    let est = adaptive(integrand, ua, ub, &breaks, AdaptiveTol { abs: scale_abs.max(tol.abs), ..tol });
    est.scale(sigma)
}

/// `int_E k(y - x) dy` for `E` bounded by the given closed edge loops.
pub fn polygon_fan(kernel: &Kernel, loops: &[&[P2]], x: P2, tol: AdaptiveTol) -> Estimate {
    let kinks = kernel.kinks();
    let mut total = Estimate::exact(0.0);
    for lp in loops {
        let n = lp.len();
        for i in 0..n {
            total = total.add(edge_contribution(kernel, &kinks, x, lp[i], lp[(i + 1) % n], tol));
        }
    }
    total
}

/// Fan integral over a region bounded by a smooth closed curve sampled
/// uniformly in its parameter, by the periodic trapezoidal rule:
/// `int G(|p - x|, e) cross(p - x, p') / |p - x|^2 dphi`.
/// Valid when `x` is well separated from the curve; the error estimate
/// compares against the rule on every other node.
pub fn curve_fan(kernel: &Kernel, points: &[P2], tangents: &[P2], x: P2) -> Estimate {
    let m = points.len();
    let dphi = 2.0 * PI / m as f64;
    let mut even = 0.0;
    let mut odd = 0.0;
    for j in 0..m {
        let z = geometry::sub(points[j], x);
        let r2 = geometry::dot(z, z);
        let r = r2.sqrt();
        let e = geometry::scale(z, 1.0 / r);
        let v = kernel.radial_primitive(e, r) * geometry::cross(z, tangents[j]) / r2;
        if j % 2 == 0 {
            even += v;
        } else {
            odd += v;
        }
    }
    let full = (even + odd) * dphi;
    let half = even * 2.0 * dphi;
    Estimate { value: full, error: (full - half).abs(), converged: true }
}

/// `int_{B_rho(c)} k(y - x) dy` by angular integration with exact ray lengths.
pub fn disk_fan(kernel: &Kernel, center: P2, rho: f64, x: P2, tol: AdaptiveTol) -> Estimate {
    let p = geometry::sub(x, center);
    let r = geometry::norm(p);
    let kink_angles: Vec<f64> = kernel.kinks().iter().map(|k| k[1].atan2(k[0])).collect();
    if r < rho * (1.0 - 1e-14) {
        let g = |th: f64| {
            let e = [th.cos(), th.sin()];
            let pe = geometry::dot(p, e);
            let disc = pe * pe - r * r + rho * rho;
            kernel.radial_primitive(e, -pe + disc.sqrt())
        };
        let phi0 = p[1].atan2(p[0]);
        // Split at the direction of the nearest boundary point, where the
        // integrand peaks as x approaches the circle.
        let mut breaks: Vec<f64> = kink_angles.iter().map(|a| (a - phi0).rem_euclid(2.0 * PI) + phi0).collect();
        breaks.push(phi0 + PI);
        adaptive(g, phi0, phi0 + 2.0 * PI, &breaks, tol)
    } else {
        // Center on or outside the circle: directions within the tangent cone.
        let beta = (rho / r).min(1.0).asin();
        let axis = [-p[0] / r, -p[1] / r];
        let phi_axis = axis[1].atan2(axis[0]);
        let g = |s: f64| {
            // theta = phi_axis + beta sin(s) absorbs the square-root endpoints.
            let th = phi_axis + beta * s.sin();
            let e = [th.cos(), th.sin()];
            let pe = geometry::dot(p, e);
            let disc = (pe * pe - r * r + rho * rho).max(0.0).sqrt();
            let (r1, r2) = ((-pe - disc).max(0.0), -pe + disc);
            (kernel.radial_primitive(e, r2) - kernel.radial_primitive(e, r1)) * beta * s.cos()
        };
        let breaks: Vec<f64> = kink_angles
            .iter()
            .filter_map(|a| {
                let rel = (a - phi_axis + PI).rem_euclid(2.0 * PI) - PI;
                (rel.abs() < beta).then(|| (rel / beta).asin())
            })
            .collect();
        adaptive(g, -0.5 * PI, 0.5 * PI, &breaks, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: AdaptiveTol = AdaptiveTol { rel: 1e-12, abs: 0.0, max_panels: 400 };

    fn square_loop() -> Vec<P2> {
        vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
    }

    #[test]
    fn center_of_unit_square_closed_form() {
        let sq = square_loop();
        let v = polygon_fan(&Kernel::Riesz { alpha: 1.0 }, &[&sq], [0.5, 0.5], TOL);
        let exact = 4.0 * (1.0 + 2f64.sqrt()).ln();
        assert!((v.value - exact).abs() < 1e-11, "{v:?} vs {exact}");
    }

    #[test]
    fn constant_kernel_recovers_area() {
        // alpha -> 0 gives k = 1: the fan integral is the area, inside or outside.
        let sq = square_loop();
        for x in [[0.3, 0.4], [2.0, -1.0], [1.0, 0.5]] {
            let v = polygon_fan(&Kernel::Riesz { alpha: 0.0 }, &[&sq], x, TOL);
            assert!((v.value - 1.0).abs() < 1e-12, "{x:?} {v:?}");
        }
    }

    #[test]
    fn disk_center_matches_ball_formula() {
        let v = disk_fan(&Kernel::Riesz { alpha: 0.5 }, [0.0, 0.0], 1.0, [0.0, 0.0], TOL);
        assert!((v.value - 4.0 * PI / 3.0).abs() < 1e-11);
        let out = disk_fan(&Kernel::Riesz { alpha: 0.0 }, [0.0, 0.0], 1.0, [3.0, 1.0], TOL);
        assert!((out.value - PI).abs() < 1e-10, "{out:?}");
        let on = disk_fan(&Kernel::Riesz { alpha: 0.0 }, [0.0, 0.0], 1.0, [1.0, 0.0], TOL);
        assert!((on.value - PI).abs() < 1e-10, "{on:?}");
    }

    #[test]
    fn log_primitive_is_consistent() {
        let f = SurfaceTension::euclidean(2).unwrap();
        // int_{B_1} log|y| dy = -pi/2.
        let v = disk_fan(&Kernel::DualLog { f: &f }, [0.0, 0.0], 1.0, [0.0, 0.0], TOL);
        assert!((v.value + 0.5 * PI).abs() < 1e-12);
    }
}

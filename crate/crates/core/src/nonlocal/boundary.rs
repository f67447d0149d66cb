//! `int_E int_E |x - y|^{-a} dx dy` for planar polygonal regions as a double
//! boundary integral.
//!
//! With `p = 2 - a`, `Delta |z|^p = p^2 |z|^{-a}` in the plane, so two
//! applications of the divergence theorem give
//! `V = -p^{-2} sum_{i,j} (n_i . n_j) int_{e_i} int_{e_j} |x - y|^p`.
//! The integrand is continuous, and the pair integrals are evaluated exactly
//! on coincident edges and by a Duffy split on edges sharing a vertex.

use crate::geometry::{self, P2};
use crate::quadrature::{adaptive, AdaptiveTol, Estimate, GaussLegendre};
use rayon::prelude::*;

struct Seg {
    a: P2,
    b: P2,
    len: f64,
    /// Unit outward normal.
    n: P2,
}

fn segments(loops: &[&[P2]]) -> Vec<Seg> {
    let mut out = Vec::new();
    for lp in loops {
        let m = lp.len();
        for i in 0..m {
            let (a, b) = (lp[i], lp[(i + 1) % m]);
            let len = geometry::dist(a, b);
            if len == 0.0 {
                continue;
            }
            out.push(Seg { a, b, len, n: geometry::scale(geometry::edge_normal(a, b), 1.0 / len) });
        }
    }
    out
}

fn same_point(p: P2, q: P2, scale: f64) -> bool {
    geometry::dist(p, q) <= 1e-14 * scale
}

/// `int_0^{L1} int_0^{L2} |s u1 - t u2|^p dt ds` for unit `u1`, `u2` (edges
/// leaving a common vertex).
fn corner_pair(l1: f64, u1: P2, l2: f64, u2: P2, p: f64, tol: f64) -> f64 {
    let t1 = adaptive(
        |v: f64| geometry::norm([l1 * u1[0] - v * l2 * u2[0], l1 * u1[1] - v * l2 * u2[1]]).powf(p),
        0.0,
        1.0,
        &[],
        AdaptiveTol { rel: tol, abs: 0.0, max_panels: 200 },
    );
    let t2 = adaptive(
        |v: f64| geometry::norm([v * l1 * u1[0] - l2 * u2[0], v * l1 * u1[1] - l2 * u2[1]]).powf(p),
        0.0,
        1.0,
        &[],
        AdaptiveTol { rel: tol, abs: 0.0, max_panels: 200 },
    );
    l1 * l2 / (p + 2.0) * (t1.value + t2.value)
}

fn segment_gap(s: &Seg, t: &Seg) -> f64 {
    let d = geometry::segment_distance(s.a, t.a, t.b)
        .min(geometry::segment_distance(s.b, t.a, t.b))
        .min(geometry::segment_distance(t.a, s.a, s.b))
        .min(geometry::segment_distance(t.b, s.a, s.b));
    // Crossing segments have zero gap even though no endpoint touches.
    let o1 = geometry::orientation(s.a, s.b, t.a) * geometry::orientation(s.a, s.b, t.b);
    let o2 = geometry::orientation(t.a, t.b, s.a) * geometry::orientation(t.a, t.b, s.b);
    if o1 < 0 && o2 < 0 {
        0.0
    } else {
        d
    }
}

fn pair_integral(s: &Seg, t: &Seg, p: f64, rules: &Rules, tol: f64) -> f64 {
    let scale = s.len.max(t.len);
    let same = (same_point(s.a, t.a, scale) && same_point(s.b, t.b, scale))
        || (same_point(s.a, t.b, scale) && same_point(s.b, t.a, scale));
    if same {
        return 2.0 * s.len.powf(p + 2.0) / ((p + 1.0) * (p + 2.0));
    }
    // Shared vertex: orient both edges away from it.
    for (sv, so) in [(s.a, s.b), (s.b, s.a)] {
        for (tv, to) in [(t.a, t.b), (t.b, t.a)] {
            if same_point(sv, tv, scale) {
                let u1 = geometry::scale(geometry::sub(so, sv), 1.0 / s.len);
                let u2 = geometry::scale(geometry::sub(to, tv), 1.0 / t.len);
                return corner_pair(s.len, u1, t.len, u2, p, tol);
            }
        }
    }
    let ratio = segment_gap(s, t) / scale;
    let rule = if ratio > 6.0 {
        &rules.q6
    } else if ratio > 2.0 {
        &rules.q12
    } else if ratio > 0.5 {
        &rules.q20
    } else {
        return nested(s, t, p, tol);
    };
    let mut acc = 0.0;
    for (x, wx) in rule.mapped(0.0, 1.0) {
        let px = lerp(s, x);
        for (y, wy) in rule.mapped(0.0, 1.0) {
            let py = lerp(t, y);
            acc += wx * wy * geometry::dist(px, py).powf(p);
        }
    }
    acc * s.len * t.len
}

fn lerp(s: &Seg, x: f64) -> P2 {
    [s.a[0] + x * (s.b[0] - s.a[0]), s.a[1] + x * (s.b[1] - s.a[1])]
}

/// Nested adaptive rule for close, non-touching (or crossing) edge pairs.
fn nested(s: &Seg, t: &Seg, p: f64, tol: f64) -> f64 {
    let inner = |x: f64| {
        let px = lerp(s, x);
        // The inner integrand has a kink at the foot of px on t.
        let d = geometry::sub(t.b, t.a);
        let foot = (geometry::dot(geometry::sub(px, t.a), d) / geometry::dot(d, d)).clamp(0.0, 1.0);
        adaptive(
            |y: f64| geometry::dist(px, lerp(t, y)).powf(p),
            0.0,
            1.0,
            &[foot],
            AdaptiveTol { rel: tol, abs: 0.0, max_panels: 200 },
        )
        .value
    };
    adaptive(inner, 0.0, 1.0, &[], AdaptiveTol { rel: tol, abs: 0.0, max_panels: 200 }).value * s.len * t.len
}

struct Rules {
    q6: GaussLegendre,
    q12: GaussLegendre,
    q20: GaussLegendre,
}

/// `int_E int_E |x - y|^{-a}` for the region bounded by the CCW loops, for
/// kernel exponents `a < 2`.
pub fn double_boundary(loops: &[&[P2]], a: f64, rel_tol: f64) -> Estimate {
    let p = 2.0 - a;
    let segs = segments(loops);
    let rules = Rules { q6: GaussLegendre::new(6), q12: GaussLegendre::new(12), q20: GaussLegendre::new(20) };
    let tol = rel_tol.max(1e-14);
    // Row sums in parallel; summed in index order for determinism.
    let rows: Vec<(f64, f64)> = (0..segs.len())
        .into_par_iter()
        .map(|i| {
            let si = &segs[i];
            let mut acc = 0.0;
            let mut mag = 0.0;
            for (j, sj) in segs.iter().enumerate().skip(i) {
                let c = geometry::dot(si.n, sj.n);
                if c == 0.0 {
                    continue;
                }
                let w = if j == i { 1.0 } else { 2.0 };
                let v = w * c * pair_integral(si, sj, p, &rules, tol);
                acc += v;
                mag += v.abs();
            }
            (acc, mag)
        })
        .collect();
    let total: f64 = rows.iter().map(|r| r.0).sum();
    let mag: f64 = rows.iter().map(|r| r.1).sum();
    let value = -total / (p * p);
    // Pair rules are accurate to about rel_tol of each term; the sum can cancel.
    let error = mag / (p * p) * tol + value.abs() * 1e-15 * (segs.len() as f64);
    Estimate { value, error, converged: true }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_kernel_gives_area_squared() {
        let tri = [[0.0, 0.0], [2.0, 0.0], [0.5, 1.5]];
        let v = double_boundary(&[&tri], 0.0, 1e-12);
        assert!((v.value - 2.25).abs() < 1e-12, "{v:?}");
    }

    #[test]
    fn quadratic_moment_of_square() {
        // int int |x - y|^2 over the unit square = 2 * (1/6).
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let v = double_boundary(&[&sq], -2.0, 1e-12);
        assert!((v.value - 1.0 / 3.0).abs() < 1e-12, "{v:?}");
    }

    #[test]
    fn disjoint_loops_add_cross_terms() {
        let a = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let b = [[3.0, 0.0], [4.0, 0.0], [4.0, 1.0], [3.0, 1.0]];
        let v = double_boundary(&[&a, &b], 0.0, 1e-12);
        assert!((v.value - 4.0).abs() < 1e-11);
    }
}

//! Riesz integrals over boxes by pyramid decomposition.
//!
//! `[0, c]` is split into the pyramids joining the origin to each far face
//! `{z_i = c_i}`. Writing `z = t w` with `w` on the face, the singular radial
//! factor integrates exactly in `t` and the face integral is smooth, so a
//! tensor Gauss-Legendre rule converges geometrically.

use crate::quadrature::{Estimate, GaussLegendre};

const MAX_PANELS: usize = 32;

/// `int_{[0,c]} weight(z) |z|^{-alpha} dz`, where `weight` is `prod_j (s_j - z_j)`
/// if `s` is given and `1` otherwise.
fn moment(c: &[f64], s: Option<&[f64]>, alpha: f64, rule: &GaussLegendre) -> f64 {
    let n = c.len();
    if c.iter().any(|&v| v <= 0.0) {
        return 0.0;
    }
    let nf = n as f64;
    let mut total = 0.0;
    for i in 0..n {
        // Face nodes for the coordinates j != i.
        let mut axes: Vec<Vec<(f64, f64)>> = Vec::with_capacity(n - 1);
        for (j, &cj) in c.iter().enumerate() {
            if j == i {
                continue;
            }
            let panels = ((cj / c[i]).ceil() as usize).clamp(1, MAX_PANELS);
            let mut nodes = Vec::with_capacity(panels * rule.len());
            for p in 0..panels {
                let a = cj * p as f64 / panels as f64;
                let b = cj * (p + 1) as f64 / panels as f64;
                nodes.extend(rule.mapped(a, b));
            }
            axes.push(nodes);
        }
        let mut idx = vec![0usize; n - 1];
        let mut w = vec![0.0; n];
        let mut coef = vec![0.0; n + 1];
        let mut face_sum = 0.0;
        loop {
            let mut weight = c[i];
            let mut r2 = c[i] * c[i];
            w[i] = c[i];
            let mut k = 0;
            for (j, wj) in w.iter_mut().enumerate() {
                if j == i {
                    continue;
                }
                let (x, wt) = axes[k][idx[k]];
                *wj = x;
                weight *= wt;
                r2 += x * x;
                k += 1;
            }
            let radial = match s {
                None => 1.0 / (nf - alpha),
                Some(s) => {
                    // prod_j (s_j - t w_j) = sum_k coef_k t^k.
                    coef.iter_mut().for_each(|v| *v = 0.0);
                    coef[0] = 1.0;
                    for j in 0..n {
                        for deg in (0..=j + 1).rev() {
                            let lower = if deg > 0 { coef[deg - 1] } else { 0.0 };
                            coef[deg] = coef[deg] * s[j] - lower * w[j];
                        }
                    }
                    (0..=n).map(|deg| coef[deg] / (nf - alpha + deg as f64)).sum()
                }
            };
            face_sum += weight * r2.powf(-0.5 * alpha) * radial;
            // Odometer over the face grid.
            let mut d = 0;
            while d < n - 1 {
                idx[d] += 1;
                if idx[d] < axes[d].len() {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == n - 1 {
                break;
            }
        }
        total += face_sum;
    }
    total
}

/// `V(box) = int int_{box x box} |x - y|^{-alpha}` for side lengths `s`.
pub fn box_interaction(s: &[f64], alpha: f64, q: usize) -> Estimate {
    let scale = (1usize << s.len()) as f64;
    let coarse = scale * moment(s, Some(s), alpha, &GaussLegendre::new(q));
    let fine = scale * moment(s, Some(s), alpha, &GaussLegendre::new(2 * q));
    Estimate { value: fine, error: (fine - coarse).abs(), converged: true }
}

/// Riesz potential at `x` of the centered box with sides `s`.
pub fn box_potential(s: &[f64], x: &[f64], alpha: f64, q: usize) -> Estimate {
    let rule = GaussLegendre::new(q);
    let rule2 = GaussLegendre::new(2 * q);
    let n = s.len();
    let mut coarse = 0.0;
    let mut fine = 0.0;
    for mask in 0..(1usize << n) {
        let mut sign = 1.0;
        let mut c = vec![0.0; n];
        for i in 0..n {
            let bound = if mask >> i & 1 == 1 { 0.5 * s[i] - x[i] } else { -0.5 * s[i] - x[i] };
            if mask >> i & 1 == 0 {
                sign = -sign;
            }
            if bound < 0.0 {
                sign = -sign;
            }
            c[i] = bound.abs();
        }
        if c.iter().any(|&v| v == 0.0) {
            continue;
        }
        coarse += sign * moment(&c, None, alpha, &rule);
        fine += sign * moment(&c, None, alpha, &rule2);
    }
    Estimate { value: fine, error: (fine - coarse).abs(), converged: true }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn square_center_potential_closed_form() {
        let v = box_potential(&[1.0, 1.0], &[0.0, 0.0], 1.0, 12);
        assert!((v.value - 4.0 * (1.0 + 2f64.sqrt()).ln()).abs() < 1e-13, "{v:?}");
    }

    #[test]
    fn zero_exponent_gives_volume_squared() {
        let v = box_interaction(&[0.7, 1.3, 2.0], 0.0, 8);
        let vol: f64 = 0.7 * 1.3 * 2.0;
        assert!((v.value - vol * vol).abs() < 1e-12);
    }

    #[test]
    fn cube_potential_at_center_is_bounded_by_ball() {
        let v = box_potential(&[1.0, 1.0, 1.0], &[0.0, 0.0, 0.0], 1.0, 12).value;
        let r = (3.0 / (4.0 * PI)).cbrt();
        let ball = 3.0 * (4.0 * PI / 3.0) * r * r / 2.0;
        assert!(v < ball && v > 0.9 * ball);
    }
}

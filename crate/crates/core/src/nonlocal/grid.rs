//! Interaction energies and potentials of pixel masks.
//!
//! Cell pairs are grouped by their integer offset. Offsets within
//! [`NEAR`] cells use exact pair integrals of two squares; farther offsets
//! use the midpoint value `h^4 |h k|^{-alpha}`.

use super::boundary::double_boundary;
use super::fan::{polygon_fan, Kernel};
use crate::geometry::P2;
use crate::quadrature::{AdaptiveTol, Estimate};
use crate::shapes::GridMask;
use rayon::prelude::*;

const NEAR: i64 = 4;

fn square(c: P2, h: f64) -> [P2; 4] {
    let r = 0.5 * h;
    [[c[0] - r, c[1] - r], [c[0] + r, c[1] - r], [c[0] + r, c[1] + r], [c[0] - r, c[1] + r]]
}

/// `int_{Q} int_{Q + h k} |x - y|^{-alpha}` for the unit-spaced offset `k`,
/// scaled to cell size `h`.
fn exact_pair(k: (i64, i64), h: f64, alpha: f64, rel_tol: f64) -> f64 {
    let a = square([0.0, 0.0], 1.0);
    let unit = if k == (0, 0) {
        double_boundary(&[&a], alpha, rel_tol).value
    } else {
        let b = square([k.0 as f64, k.1 as f64], 1.0);
        let joint = double_boundary(&[&a, &b], alpha, rel_tol).value;
        let single = double_boundary(&[&a], alpha, rel_tol).value;
        0.5 * (joint - 2.0 * single)
    };
    unit * h.powf(4.0 - alpha)
}

pub fn grid_interaction(g: &GridMask, alpha: f64, rel_tol: f64) -> Estimate {
    let cells = g.occupied_cells();
    let h = g.h();
    // Offset histogram, counting ordered pairs.
    let (nx, ny) = g.dims();
    let wx = 2 * nx as i64 - 1;
    let wy = 2 * ny as i64 - 1;
    let chunk = cells.len() / 32 + 1;
    let rows: Vec<Vec<u64>> = cells
        .par_chunks(chunk)
        .map(|part| {
            let mut hist = vec![0u64; (wx * wy) as usize];
            for &(i, j) in part {
                for &(p, q) in &cells {
                    let dx = p as i64 - i as i64 + nx as i64 - 1;
                    let dy = q as i64 - j as i64 + ny as i64 - 1;
                    hist[(dy * wx + dx) as usize] += 1;
                }
            }
            hist
        })
        .collect();
    let mut hist = vec![0u64; (wx * wy) as usize];
    for r in &rows {
        for (a, b) in hist.iter_mut().zip(r) {
            *a += b;
        }
    }
    let mut near_cache = std::collections::BTreeMap::new();
    let mut total = 0.0;
    let mut far_part = 0.0;
    for dy in 0..wy {
        for dx in 0..wx {
            let c = hist[(dy * wx + dx) as usize];
            if c == 0 {
                continue;
            }
            let k = (dx - (nx as i64 - 1), dy - (ny as i64 - 1));
            let key = (k.0.abs().max(k.1.abs()), k.0.abs().min(k.1.abs()));
            let w = if key.0 <= NEAR {
                *near_cache.entry(key).or_insert_with(|| exact_pair(key, h, alpha, rel_tol))
            } else {
                let d = h * ((k.0 * k.0 + k.1 * k.1) as f64).sqrt();
                let v = h.powi(4) * d.powf(-alpha);
                far_part += c as f64 * v;
                v
            };
            total += c as f64 * w;
        }
    }
    // Midpoint error on a cell pair at distance d is ~ alpha (alpha+2) h^2 / (12 d^2).
    let far_rel = alpha * (alpha + 2.0) / (12.0 * (NEAR as f64 + 1.0).powi(2));
    Estimate { value: total, error: far_part * far_rel, converged: true }
}

pub fn grid_potential(g: &GridMask, x: P2, alpha: f64, tol: AdaptiveTol) -> Estimate {
    let h = g.h();
    let kernel = Kernel::Riesz { alpha };
    let mut total = Estimate::exact(0.0);
    for (i, j) in g.occupied_cells() {
        let c = g.cell_center(i, j);
        let d = ((c[0] - x[0]).powi(2) + (c[1] - x[1]).powi(2)).sqrt();
        if d <= (NEAR as f64 + 0.5) * h {
            let sq = square(c, h);
            total = total.add(polygon_fan(&kernel, &[&sq], x, tol));
        } else {
            let v = h * h * d.powf(-alpha);
            total = total.add(Estimate { value: v, error: v * alpha * (alpha + 2.0) * h * h / (12.0 * d * d), converged: true });
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_is_exact() {
        let g = GridMask::new(0.5, [0.0, 0.0], 1, 1, vec![true]).unwrap();
        let v = grid_interaction(&g, 0.0, 1e-12);
        assert!((v.value - 0.0625).abs() < 1e-14);
    }

    #[test]
    fn zero_exponent_counts_pairs() {
        let g = GridMask::new(0.1, [0.0, 0.0], 10, 10, vec![true; 100]).unwrap();
        let v = grid_interaction(&g, 0.0, 1e-12);
        assert!((v.value - 1.0).abs() < 1e-10, "{v:?}");
    }
}

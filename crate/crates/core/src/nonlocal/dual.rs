//! Dual-norm potentials `U_1`, `U_2`, `U_3` and their inner optimization
//! over the center `y`.

use super::fan::Kernel;
use super::FanDomain;
use crate::geometry::P2;
use crate::quadrature::{AdaptiveTol, Estimate};
use serde::{Deserialize, Serialize};

/// Which dual potential, with its exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "i", rename_all = "lowercase", deny_unknown_fields)]
pub enum DualKind {
    /// `U_1 = sup_y int_E f_*(x - y)^{-alpha}`.
    U1 { alpha: f64 },
    /// `U_2 = -inf_y int_E f_*(x - y)^beta`.
    U2 { beta: f64 },
    /// `U_3 = -inf_y int_E log f_*(x - y)`.
    U3,
}

impl DualKind {
    pub fn index(&self) -> u8 {
        match self {
            DualKind::U1 { .. } => 1,
            DualKind::U2 { .. } => 2,
            DualKind::U3 => 3,
        }
    }

    pub(crate) fn kernel<'a>(&self, f: &'a crate::anisotropy::SurfaceTension) -> Kernel<'a> {
        match *self {
            DualKind::U1 { alpha } => Kernel::DualPower { f, p: -alpha },
            DualKind::U2 { beta } => Kernel::DualPower { f, p: beta },
            DualKind::U3 => Kernel::DualLog { f },
        }
    }

    /// `U = sign * J(y*)` where `J` is the inner integral.
    fn sign(&self) -> f64 {
        match self {
            DualKind::U1 { .. } => 1.0,
            _ => -1.0,
        }
    }

    /// Closed form of `U_i(K)` for the Wulff shape of volume `|K|` in `R^n`.
    pub fn wulff_value(&self, n: usize, volume: f64) -> f64 {
        let nf = n as f64;
        match *self {
            DualKind::U1 { alpha } => nf * volume / (nf - alpha),
            DualKind::U2 { beta } => -nf * volume / (nf + beta),
            DualKind::U3 => volume / nf,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualReport {
    pub i: u8,
    pub value: f64,
    pub error: f64,
    pub y_star: P2,
    pub converged: bool,
    pub evaluations: usize,
    /// `U_1` with `alpha >= 1`, outside the range the theory covers.
    pub outside_theory_range: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct DescentOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub budget: usize,
}

/// Coordinate descent with shrinking steps on `phi`, from `start`.
/// Returns `(y, phi(y), evaluations, reached_min_step)`.
pub fn coordinate_descent(
    mut phi: impl FnMut(P2) -> f64,
    start: P2,
    opts: DescentOptions,
) -> (P2, f64, usize, bool) {
    let mut y = start;
    let mut best = phi(y);
    let mut evals = 1;
    let mut step = opts.initial_step;
    while step > opts.min_step {
        if evals >= opts.budget {
            return (y, best, evals, false);
        }
        let mut improved = false;
        for k in 0..2 {
            for s in [1.0, -1.0] {
                let mut cand = y;
                cand[k] += s * step;
                let v = phi(cand);
                evals += 1;
                if v < best {
                    y = cand;
                    best = v;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (y, best, evals, true)
}

pub(crate) fn optimize(
    dom: &FanDomain,
    kernel: &Kernel,
    kind: DualKind,
    start: P2,
    bbox: (P2, P2),
    diam: f64,
    tol: AdaptiveTol,
    budget: usize,
) -> DualReport {
    let sign = kind.sign();
    let eval = |y: P2| -> Estimate { dom.integrate(kernel, y, tol) };
    let phi = |y: P2| -sign * eval(y).value;
    let opts = DescentOptions { initial_step: 0.25 * diam, min_step: 1e-6, budget };
    let (mut y, best, mut evals, mut converged) = coordinate_descent(phi, start, opts);
    // Coarse grid guard against local traps.
    let (lo, hi) = bbox;
    let mut grid_best: Option<(P2, f64)> = None;
    for i in 0..5 {
        for j in 0..5 {
            let p = [
                lo[0] + (i as f64 + 0.5) / 5.0 * (hi[0] - lo[0]),
                lo[1] + (j as f64 + 0.5) / 5.0 * (hi[1] - lo[1]),
            ];
            let v = phi(p);
            evals += 1;
            if grid_best.map_or(true, |(_, b)| v < b) {
                grid_best = Some((p, v));
            }
        }
    }
    if let Some((p, v)) = grid_best {
        if v < best - 1e-9 * best.abs().max(1e-300) {
            let (y2, b2, e2, c2) = coordinate_descent(phi, p, opts);
            evals += e2;
            if b2 < best {
                y = y2;
                converged = c2;
            }
        }
    }
    let est = eval(y);
    DualReport {
        i: kind.index(),
        value: sign * est.value,
        error: est.error,
        y_star: y,
        converged: converged && est.converged,
        evaluations: evals,
        outside_theory_range: matches!(kind, DualKind::U1 { alpha } if alpha >= 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descent_finds_quadratic_minimum() {
        let (y, v, _, ok) = coordinate_descent(
            |p| (p[0] - 0.3).powi(2) + 2.0 * (p[1] + 0.1).powi(2),
            [0.0, 0.0],
            DescentOptions { initial_step: 0.25, min_step: 1e-8, budget: 10_000 },
        );
        assert!(ok && v < 1e-14);
        assert!((y[0] - 0.3).abs() < 1e-7 && (y[1] + 0.1).abs() < 1e-7);
    }
}

//! Brute-force Monte Carlo estimates, independent of the quadrature routes.
//!
//! Directions are drawn with density proportional to `r^{1-a}` on a disk of
//! radius `R`, which absorbs a `|z|^{-a}` kernel singularity exactly. Samples
//! are stratified on a square grid of `(theta, u)` cells and paired
//! antithetically; each stratum row has its own ChaCha stream so the result
//! does not depend on the thread count.

use super::fan::Kernel;
use crate::geometry::P2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Radial exponent absorbed by the sampler and the residual weight
/// `k(z) |z|^a` for a kernel.
fn split_kernel(kernel: &Kernel) -> f64 {
    match *kernel {
        Kernel::Riesz { alpha } => alpha,
        Kernel::DualPower { p, .. } => (-p).max(0.0),
        Kernel::DualLog { .. } => 0.0,
    }
}

fn residual_weight(kernel: &Kernel, a: f64, z: P2) -> f64 {
    let r = (z[0] * z[0] + z[1] * z[1]).sqrt();
    match *kernel {
        Kernel::Riesz { .. } => 1.0,
        _ => kernel.value(z) * r.powf(a),
    }
}

struct Sampler {
    a: f64,
    r_max: f64,
    /// Integral of `|z|^{-a}` over the disk of radius `r_max`.
    mass: f64,
}

impl Sampler {
    fn new(a: f64, r_max: f64) -> Self {
        Self { a, r_max, mass: 2.0 * PI * r_max.powf(2.0 - a) / (2.0 - a) }
    }

    fn point(&self, t: f64, u: f64) -> P2 {
        let th = 2.0 * PI * t;
        let r = self.r_max * u.powf(1.0 / (2.0 - self.a));
        [r * th.cos(), r * th.sin()]
    }
}

/// Row-stratified driver: `k x k` strata, one antithetic pair per stratum.
/// `eval(row_rng, t, u)` returns the mean over the pair.
fn stratified(samples: u64, seed: u64, eval: impl Fn(&mut ChaCha8Rng, f64, f64) -> f64 + Sync) -> (f64, f64, u64) {
    let pairs = (samples / 2).max(1);
    let k = ((pairs as f64).sqrt().floor() as u64).max(1);
    let rows: Vec<(f64, f64)> = (0..k)
        .into_par_iter()
        .map(|row| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(row);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for col in 0..k {
                let t = (row as f64 + rng.gen::<f64>()) / k as f64;
                let u = (col as f64 + rng.gen::<f64>()) / k as f64;
                let v = eval(&mut rng, t, u);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let n = (k * k) as f64;
    let s: f64 = rows.iter().map(|r| r.0).sum();
    let s2: f64 = rows.iter().map(|r| r.1).sum();
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt(), 2 * k * k)
}

/// `int_E k(y - x) dy` for the region with indicator `inside`, contained in
/// the disk of radius `r_max` about `x`.
pub fn potential_mc(
    inside: impl Fn(P2) -> bool + Sync,
    kernel: &Kernel,
    x: P2,
    r_max: f64,
    samples: u64,
    seed: u64,
) -> McEstimate {
    let a = split_kernel(kernel);
    let sampler = Sampler::new(a, r_max);
    let one = |z: P2| {
        if inside([x[0] + z[0], x[1] + z[1]]) {
            residual_weight(kernel, a, z)
        } else {
            0.0
        }
    };
    let (mean, se, n) = stratified(samples, seed, |_, t, u| {
        let z1 = sampler.point(t, u);
        let z2 = sampler.point((t + 0.5).fract(), 1.0 - u);
        0.5 * (one(z1) + one(z2))
    });
    McEstimate { value: sampler.mass * mean, std_error: sampler.mass * se, samples: n }
}

/// `int_E int_E k(y - x) dx dy` with `x` stratified over the bounding box
/// `[lo, hi]` and `y - x` drawn radially out to the diameter.
pub fn interaction_mc(
    inside: impl Fn(P2) -> bool + Sync,
    kernel: &Kernel,
    lo: P2,
    hi: P2,
    samples: u64,
    seed: u64,
) -> McEstimate {
    let a = split_kernel(kernel);
    let w = [hi[0] - lo[0], hi[1] - lo[1]];
    let diam = (w[0] * w[0] + w[1] * w[1]).sqrt();
    let sampler = Sampler::new(a, diam);
    let box_area = w[0] * w[1];
    let (mean, se, n) = stratified(samples, seed, |rng, t, u| {
        let x = [lo[0] + w[0] * t, lo[1] + w[1] * u];
        if !inside(x) {
            return 0.0;
        }
        let z = sampler.point(rng.gen(), rng.gen());
        let mut acc = 0.0;
        for y in [[x[0] + z[0], x[1] + z[1]], [x[0] - z[0], x[1] - z[1]]] {
            if inside(y) {
                acc += residual_weight(kernel, a, z);
            }
        }
        0.5 * acc
    });
    let scale = box_area * sampler.mass;
    McEstimate { value: scale * mean, std_error: scale * se, samples: n }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_center_potential() {
        let inside = |p: P2| p[0] * p[0] + p[1] * p[1] < 1.0;
        let est = potential_mc(inside, &Kernel::Riesz { alpha: 1.0 }, [0.0, 0.0], 1.0, 10_000, 7);
        // Exact sampling: every sample lies inside.
        assert!((est.value - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let inside = |p: P2| p[0].abs() < 0.5 && p[1].abs() < 0.5;
        let k = Kernel::Riesz { alpha: 1.0 };
        let a = interaction_mc(inside, &k, [-0.5, -0.5], [0.5, 0.5], 20_000, 3);
        let b = interaction_mc(inside, &k, [-0.5, -0.5], [0.5, 0.5], 20_000, 3);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}

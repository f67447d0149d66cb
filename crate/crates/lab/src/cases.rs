//! Seeded random test shapes.

use anisodrop::anisotropy::WulffShape;
use anisodrop::geometry::{self, P2};
use anisodrop::shapes::{self, Polygon, Shape, SlicingPlane, StarDomain};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;

/// Generator for case `index` of a suite; independent streams per case.
pub fn rng(seed: u64, suite: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed ^ suite.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    r.set_stream(index);
    r
}

/// Star-shaped polygon with jittered angles and radii in `[0.4, 1.2]`.
pub fn star_polygon(rng: &mut ChaCha8Rng) -> Polygon {
    let m = rng.gen_range(5..=12);
    let c = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
    let verts: Vec<P2> = (0..m)
        .map(|j| {
            let t = 2.0 * PI * (j as f64 + rng.gen_range(0.1..0.9)) / m as f64;
            let r = rng.gen_range(0.4..1.2);
            [c[0] + r * t.cos(), c[1] + r * t.sin()]
        })
        .collect();
    Polygon::new(verts).expect("star polygons are simple")
}

/// Convex hull of random points in a disk.
pub fn convex_polygon(rng: &mut ChaCha8Rng, center: P2) -> Polygon {
    loop {
        let m = rng.gen_range(6..=12);
        let pts: Vec<P2> = (0..m)
            .map(|_| {
                let t = rng.gen_range(0.0..2.0 * PI);
                let r = rng.gen_range(0.5f64..1.0).sqrt();
                [center[0] + r * t.cos(), center[1] + r * t.sin()]
            })
            .collect();
        let hull = geometry::convex_hull(&pts);
        if hull.len() >= 3 && geometry::signed_area(&hull) > 0.1 {
            return Polygon::new(hull).expect("hull is simple");
        }
    }
}

/// Line through the bounding box of `e` with a random direction.
pub fn plane_through(rng: &mut ChaCha8Rng, e: &Shape) -> SlicingPlane {
    let (lo, hi) = e.bounding_box().expect("planar");
    let t = rng.gen_range(0.0..2.0 * PI);
    let nu = [t.cos(), t.sin()];
    let p = [rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1])];
    SlicingPlane::new(nu, geometry::dot(nu, p)).expect("unit normal")
}

/// Star perturbation of `K` with a few random low modes of amplitude up to `amp`.
pub fn star_perturbation(rng: &mut ChaCha8Rng, k: &Arc<WulffShape>, amp: f64) -> StarDomain {
    let modes: Vec<(f64, f64, f64)> = (2..=4)
        .map(|m| (m as f64, rng.gen_range(-amp..amp), rng.gen_range(-amp..amp)))
        .collect();
    let u: Vec<f64> = k
        .angles()
        .expect("smooth")
        .iter()
        .map(|&t| modes.iter().map(|(m, a, b)| a * (m * t).cos() + b * (m * t).sin()).sum())
        .collect();
    StarDomain::new(k.clone(), u).expect("small offsets")
}

/// Same-volume competitors to `K`: half random polygons, half star perturbations.
pub fn competitors(seed: u64, suite: u64, k: &Arc<WulffShape>, count: usize) -> Vec<Shape> {
    (0..count)
        .map(|i| {
            let mut r = rng(seed, suite, i as u64);
            let e = if i % 2 == 0 {
                Shape::Polygon(star_polygon(&mut r))
            } else {
                Shape::Star(star_perturbation(&mut r, k, 0.05 * k.ell()))
            };
            shapes::rescale_to_volume(&e, k.volume()).expect("positive volume")
        })
        .collect()
}

//! Concrete set representations and their local geometry.

use crate::anisotropy::{build_wulff, tension_range, SurfaceTension, WulffShape};
use crate::error::{Error, Result};
use crate::geometry::{self, P2};
use crate::quadrature::{adaptive, AdaptiveTol};
use crate::spectral;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Default boundary resolution (points per polygon side) for Hausdorff distances.
pub const HAUSDORFF_RESOLUTION: usize = 1024;

/// Simple, positively oriented polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<P2>,
}

impl Polygon {
    pub fn new(vertices: Vec<P2>) -> Result<Self> {
        if vertices.len() < 3 || vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidShape("polygon needs at least 3 finite vertices".into()));
        }
        if geometry::signed_area(&vertices) <= 0.0 {
            return Err(Error::InvalidShape("polygon must be positively oriented".into()));
        }
        if !geometry::is_simple(&vertices) {
            return Err(Error::InvalidShape("polygon is not simple".into()));
        }
        Ok(Self { vertices })
    }

    /// Accepts either orientation and reverses clockwise input.
    pub fn from_unoriented(mut vertices: Vec<P2>) -> Result<Self> {
        if geometry::signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        Self::new(vertices)
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::new(vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    }

    /// Regular `m`-gon inscribed in the circle of radius `r` about `c`.
    pub fn regular(c: P2, r: f64, m: usize) -> Result<Self> {
        Self::new(
            (0..m)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / m as f64;
                    [c[0] + r * t.cos(), c[1] + r * t.sin()]
                })
                .collect(),
        )
    }

    pub(crate) fn new_unchecked(vertices: Vec<P2>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[P2] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (P2, P2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        geometry::signed_area(&self.vertices)
    }

    pub fn contains(&self, p: P2) -> bool {
        geometry::point_in_polygon(&self.vertices, p)
    }

    pub fn is_convex(&self) -> bool {
        geometry::is_convex_ccw(&self.vertices)
    }

    fn map(&self, g: impl Fn(P2) -> P2) -> Self {
        Self { vertices: self.vertices.iter().map(|p| g(*p)).collect() }
    }
}

/// Graph domain over a smooth Wulff shape: `dE = {s (x + u(x) nu_K(x)) + z}`.
///
/// The dilation `s` and shift `z` let volume and barycenter corrections act
/// without re-expressing `u`.
#[derive(Debug, Clone)]
pub struct StarDomain {
    base: Arc<WulffShape>,
    u: Vec<f64>,
    scale: f64,
    shift: P2,
}

impl StarDomain {
    pub fn new(base: Arc<WulffShape>, u: Vec<f64>) -> Result<Self> {
        if !base.is_smooth() {
            return Err(Error::Unsupported("star domains need a smooth base Wulff shape".into()));
        }
        if u.len() != base.samples().len() {
            return Err(Error::InvalidShape(format!(
                "star domain: {} offsets for {} base samples",
                u.len(),
                base.samples().len()
            )));
        }
        let sup = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !sup.is_finite() || sup > 0.5 * base.ell() {
            return Err(Error::InvalidShape(format!(
                "star domain: |u|_inf = {sup:.4} exceeds ell_f / 2 = {:.4}",
                0.5 * base.ell()
            )));
        }
        Ok(Self { base, u, scale: 1.0, shift: [0.0, 0.0] })
    }

    /// The Wulff shape itself (`u = 0`).
    pub fn wulff(base: Arc<WulffShape>) -> Result<Self> {
        let m = base.samples().len();
        Self::new(base, vec![0.0; m])
    }

    pub fn base(&self) -> &Arc<WulffShape> {
        &self.base
    }
    pub fn u(&self) -> &[f64] {
        &self.u
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
    pub fn shift(&self) -> P2 {
        self.shift
    }

    pub fn with_transform(&self, scale: f64, shift: P2) -> Self {
        Self { base: self.base.clone(), u: self.u.clone(), scale, shift }
    }

    fn dtheta(&self) -> f64 {
        2.0 * PI / self.u.len() as f64
    }

    /// `du/dtheta` at the samples.
    pub fn du(&self) -> Vec<f64> {
        spectral::derivative(&self.u, 2.0 * PI, 1)
    }

    /// Boundary points.
    pub fn points(&self) -> Vec<P2> {
        self.base
            .samples()
            .iter()
            .zip(&self.u)
            .map(|(s, u)| {
                let p = geometry::add(s.x, geometry::scale(s.normal, *u));
                geometry::add(geometry::scale(p, self.scale), self.shift)
            })
            .collect()
    }

    /// `dp/dtheta` at the samples: `s ((g + g'' + u) e_perp + u' e)`.
    pub fn tangents(&self) -> Vec<P2> {
        let du = self.du();
        let speed = self.base_speed();
        self.base
            .samples()
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let e = s.normal;
                let ep = geometry::perp(e);
                let a = speed[j] + self.u[j];
                geometry::scale(geometry::add(geometry::scale(ep, a), geometry::scale(e, du[j])), self.scale)
            })
            .collect()
    }

    /// `ds/dtheta` of the base curve `dK`, i.e. `g + g''`.
    pub fn base_speed(&self) -> Vec<f64> {
        let dt = self.dtheta();
        self.base.samples().iter().map(|s| s.w / dt).collect()
    }

    /// Outward normals scaled by `|dp/dtheta|`.
    pub fn scaled_normals(&self) -> Vec<P2> {
        self.tangents().into_iter().map(|t| [t[1], -t[0]]).collect()
    }

    pub fn area(&self) -> f64 {
        let pts = self.points();
        let tan = self.tangents();
        0.5 * pts.iter().zip(&tan).map(|(p, t)| geometry::cross(*p, *t)).sum::<f64>() * self.dtheta()
    }

    pub fn perimeter_f(&self, f: &SurfaceTension) -> f64 {
        self.scaled_normals().iter().map(|n| f.eval2(*n)).sum::<f64>() * self.dtheta()
    }

    pub fn first_moment(&self) -> P2 {
        let pts = self.points();
        let nrm = self.scaled_normals();
        let mut m = [0.0, 0.0];
        for (p, n) in pts.iter().zip(&nrm) {
            let xn = geometry::dot(*p, *n);
            m[0] += p[0] * xn;
            m[1] += p[1] * xn;
        }
        let s = self.dtheta() / 3.0;
        [m[0] * s, m[1] * s]
    }

    /// Boundary point at normal angle `theta`, using the exact base point and
    /// the trigonometric interpolant of `u`.
    pub fn point_at(&self, theta: f64, coeffs: &TrigInterpolant) -> P2 {
        let x = self.base.tension().gradient_at_angle(theta).expect("smooth base");
        let e = [theta.cos(), theta.sin()];
        let p = geometry::add(x, geometry::scale(e, coeffs.eval(theta)));
        geometry::add(geometry::scale(p, self.scale), self.shift)
    }

    pub fn interpolant(&self) -> TrigInterpolant {
        TrigInterpolant::new(&self.u)
    }

    pub fn polygon(&self) -> Polygon {
        Polygon::new_unchecked(self.points())
    }
}

/// Trigonometric interpolant of uniformly sampled periodic data.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    a: Vec<f64>,
    b: Vec<f64>,
    m: usize,
}

impl TrigInterpolant {
    pub fn new(values: &[f64]) -> Self {
        let m = values.len();
        let kmax = m / 2;
        let mut a = vec![0.0; kmax + 1];
        let mut b = vec![0.0; kmax + 1];
        for k in 0..=kmax {
            let (mut sa, mut sb) = (0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                let t = 2.0 * PI * (k * j % m.max(1)) as f64 / m as f64;
                sa += v * t.cos();
                sb += v * t.sin();
            }
            let w = if k == 0 || (m % 2 == 0 && k == kmax) { 1.0 } else { 2.0 };
            a[k] = w * sa / m as f64;
            b[k] = w * sb / m as f64;
        }
        Self { a, b, m }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut s = 0.0;
        for k in 0..self.a.len() {
            let (sn, cs) = (k as f64 * theta).sin_cos();
            if self.m % 2 == 0 && k == self.m / 2 {
                s += self.a[k] * cs;
            } else {
                s += self.a[k] * cs + self.b[k] * sn;
            }
        }
        s
    }
}

/// Axis-aligned box centered at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxShape {
    sides: Vec<f64>,
}

impl BoxShape {
    pub fn new(sides: Vec<f64>) -> Result<Self> {
        if sides.is_empty() || sides.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidShape("box sides must be positive".into()));
        }
        Ok(Self { sides })
    }
    pub fn sides(&self) -> &[f64] {
        &self.sides
    }
    pub fn dim(&self) -> usize {
        self.sides.len()
    }
    pub fn polygon(&self) -> Option<Polygon> {
        if self.sides.len() != 2 {
            return None;
        }
        let (a, b) = (0.5 * self.sides[0], 0.5 * self.sides[1]);
        Some(Polygon::new_unchecked(vec![[-a, -b], [a, -b], [a, b], [-a, b]]))
    }
}

/// Euclidean ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() || !(radius > 0.0 && radius.is_finite()) || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidShape("ball needs a finite center and positive radius".into()));
        }
        Ok(Self { center, radius })
    }
    pub fn center(&self) -> &[f64] {
        &self.center
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn dim(&self) -> usize {
        self.center.len()
    }
}

/// Occupancy grid in the plane. Cell `(i, j)` covers
/// `origin + h [i, i+1] x [j, j+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMask {
    h: f64,
    origin: P2,
    nx: usize,
    ny: usize,
    cells: Vec<bool>,
}

impl GridMask {
    pub fn new(h: f64, origin: P2, nx: usize, ny: usize, cells: Vec<bool>) -> Result<Self> {
        if !(h > 0.0) || cells.len() != nx * ny || !cells.iter().any(|&c| c) {
            return Err(Error::InvalidShape("grid mask must be nonempty with nx * ny cells".into()));
        }
        Ok(Self { h, origin, nx, ny, cells })
    }

    /// Rasterizes a planar shape by cell-center membership.
    pub fn rasterize(shape: &Shape, h: f64) -> Result<Self> {
        let (lo, hi) = shape.bounding_box()?;
        let nx = ((hi[0] - lo[0]) / h).ceil() as usize + 1;
        let ny = ((hi[1] - lo[1]) / h).ceil() as usize + 1;
        let origin = [lo[0] - 0.5 * h, lo[1] - 0.5 * h];
        let cells: Vec<bool> = (0..nx * ny)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k % nx, k / nx);
                shape.contains([origin[0] + (i as f64 + 0.5) * h, origin[1] + (j as f64 + 0.5) * h])
            })
            .collect();
        Self::new(h, origin, nx, ny, cells)
    }

    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn origin(&self) -> P2 {
        self.origin
    }
    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }
    pub fn occupied(&self, i: usize, j: usize) -> bool {
        self.cells[j * self.nx + i]
    }
    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }
    /// Occupied cell indices in row-major order.
    pub fn occupied_cells(&self) -> Vec<(usize, usize)> {
        (0..self.nx * self.ny).filter(|&k| self.cells[k]).map(|k| (k % self.nx, k / self.nx)).collect()
    }
    pub fn cell_center(&self, i: usize, j: usize) -> P2 {
        [self.origin[0] + (i as f64 + 0.5) * self.h, self.origin[1] + (j as f64 + 0.5) * self.h]
    }
    pub fn contains(&self, p: P2) -> bool {
        let fx = (p[0] - self.origin[0]) / self.h;
        let fy = (p[1] - self.origin[1]) / self.h;
        if fx < 0.0 || fy < 0.0 {
            return false;
        }
        let (i, j) = (fx as usize, fy as usize);
        i < self.nx && j < self.ny && self.occupied(i, j)
    }
}

/// Tagged union of set representations.
#[derive(Debug, Clone)]
pub enum Shape {
    Polygon(Polygon),
    /// Disjoint union of simple polygons (the empty union is the empty set).
    MultiPolygon(Vec<Polygon>),
    Star(StarDomain),
    Box(BoxShape),
    Ball(Ball),
    Grid(GridMask),
}

/// `H+ = {x.nu > t}`, `H- = {x.nu < t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlicingPlane {
    nu: P2,
    t: f64,
}

impl SlicingPlane {
    pub fn new(nu: P2, t: f64) -> Result<Self> {
        let r = geometry::norm(nu);
        if (r - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!("slicing normal must be a unit vector, |nu| = {r}")));
        }
        Ok(Self { nu, t })
    }
    /// Normalizes `nu`.
    pub fn from_direction(nu: P2, t: f64) -> Result<Self> {
        let r = geometry::norm(nu);
        if r == 0.0 {
            return Err(Error::InvalidParams("zero slicing normal".into()));
        }
        Ok(Self { nu: geometry::scale(nu, 1.0 / r), t })
    }
    pub fn normal(&self) -> P2 {
        self.nu
    }
    pub fn offset(&self) -> f64 {
        self.t
    }
}

/// Output of [`slice`].
#[derive(Debug, Clone)]
pub struct Slice {
    pub plus: Shape,
    pub minus: Shape,
    pub cut_measure: f64,
}

/// Point, unit outward normal, and surface weight of a boundary sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub x: P2,
    pub normal: P2,
    pub w: f64,
}

impl Shape {
    pub fn polygon(vertices: Vec<P2>) -> Result<Self> {
        Ok(Shape::Polygon(Polygon::new(vertices)?))
    }

    pub fn unit_square() -> Self {
        Shape::Polygon(Polygon::new_unchecked(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))
    }

    pub fn rectangle(a: f64) -> Result<Self> {
        Ok(Shape::Box(BoxShape::new(vec![a, 1.0 / a])?))
    }

    pub fn disk(center: P2, radius: f64) -> Result<Self> {
        Ok(Shape::Ball(Ball::new(center.to_vec(), radius)?))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Shape::Polygon(_) => "polygon",
            Shape::MultiPolygon(_) => "multipolygon",
            Shape::Star(_) => "star",
            Shape::Box(_) => "box",
            Shape::Ball(_) => "ball",
            Shape::Grid(_) => "grid",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Shape::Box(b) => b.dim(),
            Shape::Ball(b) => b.dim(),
            _ => 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Shape::MultiPolygon(v) if v.is_empty())
    }

    /// Polygonal pieces for planar polygonal representations (boxes included),
    /// star domains as their sample polygon.
    pub fn polygons(&self) -> Option<Vec<Polygon>> {
        match self {
            Shape::Polygon(p) => Some(vec![p.clone()]),
            Shape::MultiPolygon(v) => Some(v.clone()),
            Shape::Box(b) => b.polygon().map(|p| vec![p]),
            Shape::Star(s) => Some(vec![s.polygon()]),
            _ => None,
        }
    }

    pub fn contains(&self, p: P2) -> bool {
        match self {
            Shape::Polygon(q) => q.contains(p),
            Shape::MultiPolygon(v) => v.iter().any(|q| q.contains(p)),
            Shape::Star(s) => geometry::point_in_polygon(&s.points(), p),
            Shape::Box(b) => b.dim() == 2 && p[0].abs() < 0.5 * b.sides[0] && p[1].abs() < 0.5 * b.sides[1],
            Shape::Ball(b) => {
                b.dim() == 2 && (p[0] - b.center[0]).powi(2) + (p[1] - b.center[1]).powi(2) < b.radius * b.radius
            }
            Shape::Grid(g) => g.contains(p),
        }
    }

    /// Membership in any dimension (boxes and balls), planar shapes otherwise.
    pub fn contains_nd(&self, p: &[f64]) -> bool {
        match self {
            Shape::Box(b) => b.sides.iter().zip(p).all(|(s, x)| x.abs() < 0.5 * s),
            Shape::Ball(b) => b.center.iter().zip(p).map(|(c, x)| (x - c) * (x - c)).sum::<f64>() < b.radius * b.radius,
            _ => self.contains([p[0], p[1]]),
        }
    }

    pub fn bounding_box(&self) -> Result<(P2, P2)> {
        let pts: Vec<P2> = match self {
            Shape::Polygon(_) | Shape::MultiPolygon(_) | Shape::Star(_) => {
                self.polygons().unwrap().iter().flat_map(|p| p.vertices.clone()).collect()
            }
            Shape::Box(b) if b.dim() == 2 => b.polygon().unwrap().vertices,
            Shape::Ball(b) if b.dim() == 2 => {
                let (c, r) = (&b.center, b.radius);
                vec![[c[0] - r, c[1] - r], [c[0] + r, c[1] + r]]
            }
            Shape::Grid(g) => vec![
                g.origin,
                [g.origin[0] + g.nx as f64 * g.h, g.origin[1] + g.ny as f64 * g.h],
            ],
            _ => return Err(Error::Unsupported(format!("bounding box of a {}-d {}", self.dim(), self.name()))),
        };
        if pts.is_empty() {
            return Err(Error::InvalidShape("empty shape has no bounding box".into()));
        }
        let mut lo = pts[0];
        let mut hi = pts[0];
        for p in &pts {
            lo = [lo[0].min(p[0]), lo[1].min(p[1])];
            hi = [hi[0].max(p[0]), hi[1].max(p[1])];
        }
        Ok((lo, hi))
    }

    pub fn translate(&self, z: &[f64]) -> Result<Shape> {
        if z.len() != self.dim() {
            return Err(Error::InvalidParams("translation dimension mismatch".into()));
        }
        let z2 = if z.len() >= 2 { [z[0], z[1]] } else { [0.0, 0.0] };
        let mv = |p: P2| geometry::add(p, z2);
        Ok(match self {
            Shape::Polygon(p) => Shape::Polygon(p.map(mv)),
            Shape::MultiPolygon(v) => Shape::MultiPolygon(v.iter().map(|p| p.map(mv)).collect()),
            Shape::Star(s) => Shape::Star(s.with_transform(s.scale, mv(s.shift))),
            Shape::Box(b) => match b.polygon() {
                Some(p) => Shape::Polygon(p.map(mv)),
                None => return Err(Error::Unsupported("boxes in n >= 3 are centered at the origin".into())),
            },
            Shape::Ball(b) => Shape::Ball(Ball { center: b.center.iter().zip(z).map(|(c, d)| c + d).collect(), radius: b.radius }),
            Shape::Grid(g) => Shape::Grid(GridMask { origin: mv(g.origin), ..g.clone() }),
        })
    }

    /// Dilation `x -> r x` about the origin.
    pub fn dilate(&self, r: f64) -> Shape {
        let sc = |p: P2| geometry::scale(p, r);
        match self {
            Shape::Polygon(p) => Shape::Polygon(p.map(sc)),
            Shape::MultiPolygon(v) => Shape::MultiPolygon(v.iter().map(|p| p.map(sc)).collect()),
            Shape::Star(s) => Shape::Star(s.with_transform(s.scale * r, sc(s.shift))),
            Shape::Box(b) => Shape::Box(BoxShape { sides: b.sides.iter().map(|s| s * r).collect() }),
            Shape::Ball(b) => Shape::Ball(Ball { center: b.center.iter().map(|c| c * r).collect(), radius: b.radius * r }),
            Shape::Grid(g) => Shape::Grid(GridMask { h: g.h * r, origin: sc(g.origin), ..g.clone() }),
        }
    }

    /// Boundary sampling with unit outward normals and surface weights.
    /// Polygon sides get `per_edge` midpoint nodes; smooth shapes use their samples.
    pub fn boundary_points(&self, per_edge: usize) -> Result<Vec<BoundaryPoint>> {
        match self {
            Shape::Polygon(_) | Shape::MultiPolygon(_) | Shape::Box(_) if self.dim() == 2 => {
                let mut out = Vec::new();
                for poly in self.polygons().unwrap() {
                    for (a, b) in poly.edges() {
                        let len = geometry::dist(a, b);
                        let normal = geometry::scale(geometry::edge_normal(a, b), 1.0 / len);
                        for k in 0..per_edge {
                            let t = (k as f64 + 0.5) / per_edge as f64;
                            out.push(BoundaryPoint {
                                x: geometry::add(a, geometry::scale(geometry::sub(b, a), t)),
                                normal,
                                w: len / per_edge as f64,
                            });
                        }
                    }
                }
                Ok(out)
            }
            Shape::Star(s) => {
                let pts = s.points();
                let nrm = s.scaled_normals();
                let dt = s.dtheta();
                Ok(pts
                    .iter()
                    .zip(&nrm)
                    .map(|(p, n)| {
                        let l = geometry::norm(*n);
                        BoundaryPoint { x: *p, normal: geometry::scale(*n, 1.0 / l), w: l * dt }
                    })
                    .collect())
            }
            Shape::Ball(b) if b.dim() == 2 => {
                let m = per_edge.max(16);
                Ok((0..m)
                    .map(|j| {
                        let t = 2.0 * PI * j as f64 / m as f64;
                        let e = [t.cos(), t.sin()];
                        BoundaryPoint {
                            x: [b.center[0] + b.radius * e[0], b.center[1] + b.radius * e[1]],
                            normal: e,
                            w: 2.0 * PI * b.radius / m as f64,
                        }
                    })
                    .collect())
            }
            _ => Err(Error::Unsupported(format!("boundary sampling of a {}-d {}", self.dim(), self.name()))),
        }
    }

    /// Dense boundary polyline(s) used for distance computations.
    fn dense_boundary(&self, resolution: usize) -> Result<Vec<Vec<P2>>> {
        match self {
            Shape::Polygon(_) | Shape::MultiPolygon(_) | Shape::Box(_) if self.dim() == 2 => Ok(self
                .polygons()
                .unwrap()
                .iter()
                .map(|p| {
                    let mut v = Vec::new();
                    for (a, b) in p.edges() {
                        for k in 0..resolution {
                            let t = k as f64 / resolution as f64;
                            v.push(geometry::add(a, geometry::scale(geometry::sub(b, a), t)));
                        }
                    }
                    v
                })
                .collect()),
            Shape::Star(s) => {
                let interp = s.interpolant();
                let m = 4 * resolution;
                Ok(vec![(0..m).map(|j| s.point_at(2.0 * PI * j as f64 / m as f64, &interp)).collect()])
            }
            Shape::Ball(b) if b.dim() == 2 => {
                let m = 4 * resolution;
                Ok(vec![(0..m)
                    .map(|j| {
                        let t = 2.0 * PI * j as f64 / m as f64;
                        [b.center[0] + b.radius * t.cos(), b.center[1] + b.radius * t.sin()]
                    })
                    .collect()])
            }
            _ => Err(Error::Unsupported(format!("boundary sampler for {}", self.name()))),
        }
    }
}

fn poly_area_sum(v: &[Polygon]) -> f64 {
    v.iter().map(|p| p.area()).sum()
}

/// Lebesgue measure.
pub fn volume(e: &Shape) -> f64 {
    match e {
        Shape::Polygon(p) => p.area(),
        Shape::MultiPolygon(v) => poly_area_sum(v),
        Shape::Star(s) => s.area(),
        Shape::Box(b) => b.sides.iter().product(),
        Shape::Ball(b) => crate::special::omega(b.dim()) * b.radius.powi(b.dim() as i32),
        Shape::Grid(g) => g.h * g.h * g.count() as f64,
    }
}

/// `P_f(E) = int_{dE} f(nu_E)`.
pub fn aniso_perimeter(e: &Shape, f: &SurfaceTension) -> Result<f64> {
    if f.dim() != e.dim() {
        return Err(Error::InvalidParams(format!("tension dimension {} vs shape dimension {}", f.dim(), e.dim())));
    }
    match e {
        Shape::Polygon(p) => Ok(p.edges().map(|(a, b)| f.eval2(geometry::edge_normal(a, b))).sum()),
        Shape::MultiPolygon(v) => {
            Ok(v.iter().flat_map(|p| p.edges()).map(|(a, b)| f.eval2(geometry::edge_normal(a, b))).sum())
        }
        Shape::Star(s) => Ok(s.perimeter_f(f)),
        Shape::Box(b) => {
            let n = b.dim();
            let mut total = 0.0;
            for i in 0..n {
                let facet: f64 = (0..n).filter(|&j| j != i).map(|j| b.sides[j]).product();
                let mut e_i = vec![0.0; n];
                e_i[i] = 1.0;
                let plus = f.eval(&e_i);
                e_i[i] = -1.0;
                total += (plus + f.eval(&e_i)) * facet;
            }
            Ok(total)
        }
        Shape::Ball(b) => {
            let n = b.dim();
            if let SurfaceTension::Euclidean { .. } = f {
                return Ok(crate::special::sphere_area(n - 1) * b.radius.powi(n as i32 - 1));
            }
            if n != 2 {
                return Err(Error::Unsupported("anisotropic perimeter of balls in n >= 3".into()));
            }
            let breaks: Vec<f64> = f
                .wulff_facets()
                .map(|fs| fs.iter().map(|(nu, _)| nu[1].atan2(nu[0]).rem_euclid(2.0 * PI)).collect())
                .unwrap_or_default();
            let est = adaptive(
                |t| f.eval2([t.cos(), t.sin()]),
                0.0,
                2.0 * PI,
                &breaks,
                AdaptiveTol { rel: 1e-14, abs: 0.0, max_panels: 400 },
            );
            Ok(b.radius * est.value)
        }
        Shape::Grid(_) => Err(Error::Unsupported(
            "anisotropic perimeter of grid masks (staircase boundaries do not converge to P_f)".into(),
        )),
    }
}

/// `|E|^{-1} int_E x dx`.
pub fn barycenter(e: &Shape) -> Vec<f64> {
    match e {
        Shape::Polygon(p) => {
            let m = geometry::first_moment(p.vertices());
            let a = p.area();
            vec![m[0] / a, m[1] / a]
        }
        Shape::MultiPolygon(v) => {
            let mut m = [0.0, 0.0];
            for p in v {
                let q = geometry::first_moment(p.vertices());
                m = geometry::add(m, q);
            }
            let a = poly_area_sum(v);
            vec![m[0] / a, m[1] / a]
        }
        Shape::Star(s) => {
            let m = s.first_moment();
            let a = s.area();
            vec![m[0] / a, m[1] / a]
        }
        Shape::Box(b) => vec![0.0; b.dim()],
        Shape::Ball(b) => b.center.clone(),
        Shape::Grid(g) => {
            let cells = g.occupied_cells();
            let mut m = [0.0, 0.0];
            for (i, j) in &cells {
                m = geometry::add(m, g.cell_center(*i, *j));
            }
            vec![m[0] / cells.len() as f64, m[1] / cells.len() as f64]
        }
    }
}

/// `r E` with `r = (m / |E|)^{1/n}`.
pub fn rescale_to_volume(e: &Shape, m: f64) -> Result<Shape> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParams(format!("target volume must be positive, got {m}")));
    }
    let v = volume(e);
    if v <= 0.0 {
        return Err(Error::InvalidShape("cannot rescale a null set".into()));
    }
    Ok(e.dilate(dilation_factor(v, m, e.dim())))
}

/// `(m / v)^{1/n}`.
pub fn dilation_factor(v: f64, m: f64, n: usize) -> f64 {
    if n == 2 {
        (m / v).sqrt()
    } else {
        (m / v).powf(1.0 / n as f64)
    }
}

fn pieces_to_shape(mut pieces: Vec<Vec<P2>>) -> Shape {
    if pieces.len() == 1 {
        Shape::Polygon(Polygon::new_unchecked(pieces.pop().unwrap()))
    } else {
        Shape::MultiPolygon(pieces.into_iter().map(Polygon::new_unchecked).collect())
    }
}

/// Exact split of a planar polygonal shape by a line.
pub fn slice(e: &Shape, plane: &SlicingPlane) -> Result<Slice> {
    let polys = match e {
        Shape::Polygon(_) | Shape::MultiPolygon(_) => e.polygons().unwrap(),
        Shape::Box(b) if b.dim() == 2 => vec![b.polygon().unwrap()],
        _ => return Err(Error::Unsupported(format!("slicing a {}-d {}", e.dim(), e.name()))),
    };
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut cut = 0.0;
    for p in &polys {
        let s = geometry::split_polygon(p.vertices(), plane.nu, plane.t);
        plus.extend(s.plus);
        minus.extend(s.minus);
        cut += s.cut_length;
    }
    Ok(Slice { plus: pieces_to_shape(plus), minus: pieces_to_shape(minus), cut_measure: cut })
}

fn polyline_distance(p: P2, lines: &[Vec<P2>]) -> f64 {
    let mut best = f64::INFINITY;
    for l in lines {
        let n = l.len();
        for i in 0..n {
            best = best.min(geometry::segment_distance(p, l[i], l[(i + 1) % n]));
        }
    }
    best
}

/// Symmetric Hausdorff distance between dense boundary samplings.
pub fn hausdorff_boundary_distance(e: &Shape, f: &Shape) -> Result<f64> {
    hausdorff_boundary_distance_with(e, f, HAUSDORFF_RESOLUTION)
}

pub fn hausdorff_boundary_distance_with(e: &Shape, f: &Shape, resolution: usize) -> Result<f64> {
    let be = e.dense_boundary(resolution)?;
    let bf = f.dense_boundary(resolution)?;
    // Each point is compared with the other boundary as a polyline at a coarser
    // resolution; segment distances make this exact for polygons.
    let coarse_e = e.dense_boundary(1.max(resolution / 16))?;
    let coarse_f = f.dense_boundary(1.max(resolution / 16))?;
    let one_sided = |from: &[Vec<P2>], to: &[Vec<P2>]| -> f64 {
        let pts: Vec<P2> = from.iter().flatten().copied().collect();
        pts.par_iter().map(|p| polyline_distance(*p, to)).reduce(|| 0.0, f64::max)
    };
    let to_f = if matches!(f, Shape::Polygon(_) | Shape::MultiPolygon(_) | Shape::Box(_)) { &coarse_f } else { &bf };
    let to_e = if matches!(e, Shape::Polygon(_) | Shape::MultiPolygon(_) | Shape::Box(_)) { &coarse_e } else { &be };
    Ok(one_sided(&be, to_f).max(one_sided(&bf, to_e)))
}

pub fn diameter(e: &Shape) -> f64 {
    match e {
        Shape::Polygon(_) | Shape::MultiPolygon(_) | Shape::Star(_) => {
            let pts: Vec<P2> = e.polygons().unwrap().iter().flat_map(|p| p.vertices.clone()).collect();
            geometry::point_set_diameter(&pts)
        }
        Shape::Box(b) => b.sides.iter().map(|s| s * s).sum::<f64>().sqrt(),
        Shape::Ball(b) => 2.0 * b.radius,
        Shape::Grid(g) => {
            let mut pts = Vec::new();
            for (i, j) in g.occupied_cells() {
                let c = g.cell_center(i, j);
                let h = 0.5 * g.h;
                pts.extend([[c[0] - h, c[1] - h], [c[0] + h, c[1] - h], [c[0] + h, c[1] + h], [c[0] - h, c[1] + h]]);
            }
            geometry::point_set_diameter(&pts)
        }
    }
}

/// Norms of the graph offsets of a star domain over `dK`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarNorms {
    pub sup: f64,
    /// `max |du/ds|` with `s` the arclength of `dK`.
    pub c1_seminorm: f64,
    /// `(int_{dK} u^2 + (du/ds)^2)^{1/2}`.
    pub h1: f64,
}

impl StarNorms {
    /// `|u|_inf + |du/ds|_inf`.
    pub fn c1(&self) -> f64 {
        self.sup + self.c1_seminorm
    }
}

/// Norms of offsets `u` sampled at the (uniform-angle) samples of `base`.
/// Arclength derivatives are spectral.
pub fn star_norms(u: &[f64], base: &WulffShape) -> Result<StarNorms> {
    if !base.is_smooth() || u.len() != base.samples().len() {
        return Err(Error::InvalidShape("offsets must match the samples of a smooth Wulff shape".into()));
    }
    let m = u.len();
    let dt = 2.0 * PI / m as f64;
    let du = spectral::derivative(u, 2.0 * PI, 1);
    let mut sup = 0.0f64;
    let mut c1 = 0.0f64;
    let mut h1 = 0.0;
    for j in 0..m {
        let w = base.samples()[j].w;
        let dsdt = w / dt;
        let dus = du[j] / dsdt;
        sup = sup.max(u[j].abs());
        c1 = c1.max(dus.abs());
        h1 += w * (u[j] * u[j] + dus * dus);
    }
    Ok(StarNorms { sup, c1_seminorm: c1, h1: h1.sqrt() })
}

/// `|E symmetric-difference F|` for polygon pairs where one side is convex.
pub fn symmetric_difference_area(e: &Shape, f: &Shape) -> Result<f64> {
    let pe = e.polygons().ok_or_else(|| Error::Unsupported("symmetric difference needs polygons".into()))?;
    let pf = f.polygons().ok_or_else(|| Error::Unsupported("symmetric difference needs polygons".into()))?;
    let inter = |a: &[Polygon], convex: &Polygon| -> f64 {
        a.iter()
            .flat_map(|p| geometry::intersect_with_convex(p.vertices(), convex.vertices()))
            .map(|piece| geometry::signed_area(&piece))
            .sum()
    };
    let common = if pf.len() == 1 && pf[0].is_convex() {
        inter(&pe, &pf[0])
    } else if pe.len() == 1 && pe[0].is_convex() {
        inter(&pf, &pe[0])
    } else {
        return Err(Error::Unsupported("symmetric difference needs one convex polygon".into()));
    };
    Ok(volume(e) + volume(f) - 2.0 * common)
}

// ---------------------------------------------------------------- JSON

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase", deny_unknown_fields)]
pub enum ShapeSpec {
    Polygon { vertices: Vec<P2> },
    Multipolygon { polygons: Vec<Vec<P2>> },
    Star {
        tension: SurfaceTension,
        u: Vec<f64>,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        shift: P2,
    },
    Box { sides: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    /// Rows bottom to top, `'1'` for occupied cells.
    Grid { h: f64, origin: P2, rows: Vec<String> },
}

fn one() -> f64 {
    1.0
}

impl Shape {
    pub fn to_spec(&self) -> ShapeSpec {
        match self {
            Shape::Polygon(p) => ShapeSpec::Polygon { vertices: p.vertices.clone() },
            Shape::MultiPolygon(v) => ShapeSpec::Multipolygon { polygons: v.iter().map(|p| p.vertices.clone()).collect() },
            Shape::Star(s) => ShapeSpec::Star {
                tension: s.base.tension().clone(),
                u: s.u.clone(),
                scale: s.scale,
                shift: s.shift,
            },
            Shape::Box(b) => ShapeSpec::Box { sides: b.sides.clone() },
            Shape::Ball(b) => ShapeSpec::Ball { center: b.center.clone(), radius: b.radius },
            Shape::Grid(g) => ShapeSpec::Grid {
                h: g.h,
                origin: g.origin,
                rows: (0..g.ny).map(|j| (0..g.nx).map(|i| if g.occupied(i, j) { '1' } else { '0' }).collect()).collect(),
            },
        }
    }

    pub fn from_spec(spec: ShapeSpec) -> Result<Shape> {
        Ok(match spec {
            ShapeSpec::Polygon { vertices } => Shape::Polygon(Polygon::new(vertices)?),
            ShapeSpec::Multipolygon { polygons } => {
                Shape::MultiPolygon(polygons.into_iter().map(Polygon::new).collect::<Result<_>>()?)
            }
            ShapeSpec::Star { tension, u, scale, shift } => {
                let base = build_wulff(&tension, u.len())?;
                let s = StarDomain::new(base, u)?;
                if !(scale > 0.0) {
                    return Err(Error::InvalidShape("star scale must be positive".into()));
                }
                Shape::Star(s.with_transform(scale, shift))
            }
            ShapeSpec::Box { sides } => Shape::Box(BoxShape::new(sides)?),
            ShapeSpec::Ball { center, radius } => Shape::Ball(Ball::new(center, radius)?),
            ShapeSpec::Grid { h, origin, rows } => {
                let ny = rows.len();
                let nx = rows.first().map(|r| r.len()).unwrap_or(0);
                if rows.iter().any(|r| r.len() != nx || r.chars().any(|c| c != '0' && c != '1')) {
                    return Err(Error::InvalidShape("grid rows must be equal-length 0/1 strings".into()));
                }
                let cells = rows.iter().flat_map(|r| r.chars().map(|c| c == '1')).collect();
                Shape::Grid(GridMask::new(h, origin, nx, ny, cells)?)
            }
        })
    }
}

impl Serialize for Shape {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_spec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Shape {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = ShapeSpec::deserialize(d)?;
        Shape::from_spec(spec).map_err(serde::de::Error::custom)
    }
}

/// `(ell_f, L_f)` convenience for callers holding only a shape's tension.
pub fn base_range(s: &StarDomain) -> (f64, f64) {
    tension_range(s.base.tension())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_l1() -> SurfaceTension {
        SurfaceTension::scaled_l1(2, 0.5).unwrap()
    }

    fn disk_base(m: usize) -> Arc<WulffShape> {
        build_wulff(&SurfaceTension::euclidean(2).unwrap(), m).unwrap()
    }

    #[test]
    fn volumes() {
        assert_eq!(volume(&Shape::Box(BoxShape::new(vec![1.0, 1.0]).unwrap())), 1.0);
        for a in [0.3, 1.0, 2.7] {
            assert!((volume(&Shape::rectangle(a).unwrap()) - 1.0).abs() < 1e-15);
        }
        let s = StarDomain::new(disk_base(128), vec![0.5; 128]).unwrap();
        assert!((volume(&Shape::Star(s)) - PI * 2.25).abs() < 1e-6);
    }

    #[test]
    fn perimeters() {
        let f = half_l1();
        assert!((aniso_perimeter(&Shape::unit_square(), &f).unwrap() - 2.0).abs() < 1e-15);
        for a in [0.5, 1.3, 2.0] {
            let p = aniso_perimeter(&Shape::rectangle(a).unwrap(), &f).unwrap();
            assert!((p - (a + 1.0 / a)).abs() < 1e-15);
        }
        let e = SurfaceTension::euclidean(2).unwrap();
        let disk = Shape::Polygon(Polygon::regular([0.0, 0.0], 1.0, 512).unwrap());
        assert!((aniso_perimeter(&disk, &e).unwrap() - 2.0 * PI).abs() < 1e-3);
        let grid = GridMask::rasterize(&Shape::unit_square(), 0.1).unwrap();
        assert!(matches!(aniso_perimeter(&Shape::Grid(grid), &e), Err(Error::Unsupported(_))));
    }

    #[test]
    fn ball_perimeter_under_crystalline_tension() {
        let p = aniso_perimeter(&Shape::disk([0.0, 0.0], 1.0).unwrap(), &half_l1()).unwrap();
        assert!((p - 4.0).abs() < 1e-12);
    }

    #[test]
    fn barycenters() {
        let t = Shape::polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let b = barycenter(&t);
        assert!((b[0] - 1.0 / 3.0).abs() < 1e-15 && (b[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(barycenter(&Shape::rectangle(2.0).unwrap()), vec![0.0, 0.0]);
    }

    #[test]
    fn rescaling() {
        let sq = rescale_to_volume(&Shape::unit_square(), 4.0).unwrap();
        assert!((volume(&sq) - 4.0).abs() < 1e-15);
        assert!((diameter(&sq) - 8f64.sqrt()).abs() < 1e-14);
        let b = rescale_to_volume(&Shape::disk([0.0, 0.0], 1.0).unwrap(), PI / 4.0).unwrap();
        match b {
            Shape::Ball(b) => assert!((b.radius() - 0.5).abs() < 1e-15),
            _ => unreachable!(),
        }
    }

    #[test]
    fn slicing_unit_square() {
        let plane = SlicingPlane::new([1.0, 0.0], 0.5).unwrap();
        let s = slice(&Shape::unit_square(), &plane).unwrap();
        assert!((volume(&s.plus) - 0.5).abs() < 1e-15);
        assert!((s.cut_measure - 1.0).abs() < 1e-15);
        let f = half_l1();
        let gap = aniso_perimeter(&s.plus, &f).unwrap() + aniso_perimeter(&s.minus, &f).unwrap()
            - aniso_perimeter(&Shape::unit_square(), &f).unwrap();
        assert!((gap - 1.0).abs() < 1e-14);
    }

    #[test]
    fn slicing_that_misses() {
        let t = Shape::polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let s = slice(&t, &SlicingPlane::new([0.0, 1.0], 2.0).unwrap()).unwrap();
        assert!(s.plus.is_empty());
        assert_eq!(s.cut_measure, 0.0);
        assert!((volume(&s.minus) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hausdorff_examples() {
        let d1 = Shape::disk([0.0, 0.0], 1.0).unwrap();
        let d2 = Shape::disk([0.0, 0.0], 1.1).unwrap();
        assert_eq!(hausdorff_boundary_distance(&d1, &d1).unwrap(), 0.0);
        assert!((hausdorff_boundary_distance(&d1, &d2).unwrap() - 0.1).abs() < 1e-6);
        let s1 = Shape::Polygon(Polygon::rectangle(-0.5, -0.5, 0.5, 0.5).unwrap());
        let s2 = Shape::Polygon(Polygon::rectangle(-0.6, -0.6, 0.6, 0.6).unwrap());
        assert!((hausdorff_boundary_distance(&s1, &s2).unwrap() - 0.1 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn diameters() {
        assert!((diameter(&Shape::unit_square()) - 2f64.sqrt()).abs() < 1e-15);
        assert!((diameter(&Shape::rectangle(2.0).unwrap()) - 4.25f64.sqrt()).abs() < 1e-15);
        assert_eq!(diameter(&Shape::disk([1.0, 1.0], 0.7).unwrap()), 1.4);
    }

    #[test]
    fn star_norm_examples() {
        let base = disk_base(256);
        let z = star_norms(&vec![0.0; 256], &base).unwrap();
        assert_eq!((z.sup, z.c1_seminorm, z.h1), (0.0, 0.0, 0.0));
        let c = 0.2;
        let n = star_norms(&vec![c; 256], &base).unwrap();
        assert!((n.sup - c).abs() < 1e-15 && n.c1_seminorm < 1e-13);
        assert!((n.h1 - c * (2.0 * PI).sqrt()).abs() < 1e-12);
        let d = 0.05;
        let u: Vec<f64> = base.angles().unwrap().iter().map(|t| d * t.cos()).collect();
        let n = star_norms(&u, &base).unwrap();
        assert!((n.h1 * n.h1 - 2.0 * PI * d * d).abs() < 1e-12);
    }

    #[test]
    fn shape_json_round_trip() {
        let shapes = vec![
            Shape::unit_square(),
            Shape::rectangle(2.0).unwrap(),
            Shape::disk([0.5, 0.0], 2.0).unwrap(),
            Shape::Star(StarDomain::new(disk_base(32), vec![0.1; 32]).unwrap()),
        ];
        for s in shapes {
            let j = serde_json::to_string(&s).unwrap();
            let back: Shape = serde_json::from_str(&j).unwrap();
            assert!((volume(&back) - volume(&s)).abs() < 1e-12, "{j}");
        }
    }

    #[test]
    fn star_over_crystalline_base_rejected() {
        let k = build_wulff(&half_l1(), 64).unwrap();
        let m = k.samples().len();
        assert!(matches!(StarDomain::new(k, vec![0.0; m]), Err(Error::Unsupported(_))));
    }
}

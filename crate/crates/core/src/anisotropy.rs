//! Surface tensions `f`, their duals `f_*`, and Wulff shapes `K = {f_* < 1}`.
//!
//! Planar smooth Wulff shapes are parameterized by the outer normal angle:
//! the boundary point with normal `e(theta)` is `grad f(e(theta))`.
//! Crystalline Wulff shapes are exact polygons.

use crate::error::{Error, Result};
use crate::geometry::{self, P2};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Angular grid used by the convexity certificate and dense range searches.
pub const CERTIFICATE_GRID: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticTension {
    n: usize,
    a: DMatrix<f64>,
    a_inv: DMatrix<f64>,
    singular: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrystallineTension {
    n: usize,
    points: Vec<Vec<f64>>,
    geometry: CrystalGeometry,
}

#[derive(Debug, Clone, PartialEq)]
enum CrystalGeometry {
    /// Planar: Wulff polygon (CCW) and its facets as (unit normal, support value).
    Planar { vertices: Vec<P2>, facets: Vec<(P2, f64)> },
    /// Axis-aligned box with half-widths `h`.
    Box { half: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedTension {
    delta: f64,
    harmonics: Vec<(u32, f64)>,
}

/// A positively one-homogeneous, convex, positive surface tension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensionSpec", into = "TensionSpec")]
pub enum SurfaceTension {
    Euclidean { n: usize },
    Quadratic(QuadraticTension),
    Crystalline(CrystallineTension),
    PerturbedEuclidean2D(PerturbedTension),
}

/// JSON form of a surface tension.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase", deny_unknown_fields)]
pub enum TensionSpec {
    Euclidean { n: usize },
    /// Row-major `n x n` matrix.
    Quadratic { n: usize, matrix: Vec<f64> },
    /// Points flattened as `x1_1, .., x1_n, x2_1, ..`.
    Crystalline { n: usize, points: Vec<f64> },
    Perturbed { delta: f64, k: Vec<u32>, c: Vec<f64> },
}

impl TryFrom<TensionSpec> for SurfaceTension {
    type Error = Error;
    fn try_from(spec: TensionSpec) -> Result<Self> {
        match spec {
            TensionSpec::Euclidean { n } => SurfaceTension::euclidean(n),
            TensionSpec::Quadratic { n, matrix } => SurfaceTension::quadratic(n, &matrix),
            TensionSpec::Crystalline { n, points } => {
                if n == 0 || points.len() % n != 0 {
                    return Err(Error::InvalidTension(format!(
                        "crystalline points length {} is not a multiple of n = {n}",
                        points.len()
                    )));
                }
                SurfaceTension::crystalline(points.chunks(n).map(|c| c.to_vec()).collect())
            }
            TensionSpec::Perturbed { delta, k, c } => {
                if k.len() != c.len() {
                    return Err(Error::InvalidTension("perturbed: k and c differ in length".into()));
                }
                SurfaceTension::perturbed(delta, k.into_iter().zip(c).collect())
            }
        }
    }
}

impl From<SurfaceTension> for TensionSpec {
    fn from(f: SurfaceTension) -> Self {
        match f {
            SurfaceTension::Euclidean { n } => TensionSpec::Euclidean { n },
            SurfaceTension::Quadratic(q) => {
                let mut m = Vec::with_capacity(q.n * q.n);
                for i in 0..q.n {
                    for j in 0..q.n {
                        m.push(q.a[(i, j)]);
                    }
                }
                TensionSpec::Quadratic { n: q.n, matrix: m }
            }
            SurfaceTension::Crystalline(c) => {
                TensionSpec::Crystalline { n: c.n, points: c.points.iter().flatten().copied().collect() }
            }
            SurfaceTension::PerturbedEuclidean2D(p) => TensionSpec::Perturbed {
                delta: p.delta,
                k: p.harmonics.iter().map(|h| h.0).collect(),
                c: p.harmonics.iter().map(|h| h.1).collect(),
            },
        }
    }
}

impl SurfaceTension {
    pub fn euclidean(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTension("dimension must be positive".into()));
        }
        Ok(SurfaceTension::Euclidean { n })
    }

    /// `f(nu) = |A nu|` for a symmetric positive-definite `A` (row-major).
    pub fn quadratic(n: usize, matrix: &[f64]) -> Result<Self> {
        if n == 0 || matrix.len() != n * n {
            return Err(Error::InvalidTension(format!("quadratic: expected {} matrix entries", n * n)));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidTension("quadratic: non-finite entry".into()));
        }
        let a = DMatrix::from_row_slice(n, n, matrix);
        let scale = a.amax().max(f64::MIN_POSITIVE);
        for i in 0..n {
            for j in 0..i {
                if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidTension("quadratic: matrix is not symmetric".into()));
                }
            }
        }
        let a = (&a + a.transpose()) * 0.5;
        if a.clone().cholesky().is_none() {
            return Err(Error::InvalidTension("quadratic: matrix is not positive definite".into()));
        }
        let eig = a.clone().symmetric_eigen();
        let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let a_inv = a.clone().try_inverse().ok_or_else(|| Error::InvalidTension("quadratic: singular".into()))?;
        Ok(SurfaceTension::Quadratic(QuadraticTension { n, a, a_inv, singular: (lo, hi) }))
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = diag[i];
        }
        Self::quadratic(n, &m)
    }

    /// `f(nu) = max_i x_i . nu`.
    pub fn crystalline(points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.first().map(|p| p.len()).unwrap_or(0);
        if n == 0 || points.iter().any(|p| p.len() != n) {
            return Err(Error::InvalidTension("crystalline: points need one common dimension".into()));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidTension("crystalline: non-finite coordinate".into()));
        }
        let geometry = if n == 2 {
            planar_crystal(&points)?
        } else {
            box_crystal(&points)?
        };
        Ok(SurfaceTension::Crystalline(CrystallineTension { n, points, geometry }))
    }

    /// `f = s * ||.||_1`, the crystalline tension with points `{-s, s}^n`.
    pub fn scaled_l1(n: usize, s: f64) -> Result<Self> {
        let mut points = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            points.push((0..n).map(|i| if mask >> i & 1 == 1 { s } else { -s }).collect());
        }
        Self::crystalline(points)
    }

    /// `f(nu) = |nu| (1 + delta sum_k c_k cos(k theta))`, planar only.
    pub fn perturbed(delta: f64, harmonics: Vec<(u32, f64)>) -> Result<Self> {
        if !delta.is_finite() || harmonics.iter().any(|h| !h.1.is_finite()) {
            return Err(Error::InvalidTension("perturbed: non-finite parameter".into()));
        }
        let p = PerturbedTension { delta, harmonics };
        let mut worst = (f64::INFINITY, 0.0);
        let mut min_g = f64::INFINITY;
        for j in 0..CERTIFICATE_GRID {
            let th = 2.0 * PI * j as f64 / CERTIFICATE_GRID as f64;
            let (g, _, g2) = p.angular(th);
            min_g = min_g.min(g);
            if g + g2 < worst.0 {
                worst = (g + g2, th);
            }
        }
        if min_g <= 0.0 {
            return Err(Error::InvalidTension(format!("perturbed: f is not positive (min {min_g:.3e})")));
        }
        if worst.0 <= 0.0 {
            return Err(Error::NotConvex { min_value: worst.0, theta: worst.1 });
        }
        Ok(SurfaceTension::PerturbedEuclidean2D(p))
    }

    pub fn dim(&self) -> usize {
        match self {
            SurfaceTension::Euclidean { n } => *n,
            SurfaceTension::Quadratic(q) => q.n,
            SurfaceTension::Crystalline(c) => c.n,
            SurfaceTension::PerturbedEuclidean2D(_) => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SurfaceTension::Euclidean { .. } => "euclidean",
            SurfaceTension::Quadratic(_) => "quadratic",
            SurfaceTension::Crystalline(_) => "crystalline",
            SurfaceTension::PerturbedEuclidean2D(_) => "perturbed",
        }
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self, SurfaceTension::Crystalline(_))
    }

    /// Returns `2 f` style multiples: `(s f)(nu) = s f(nu)`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidTension("scale must be positive".into()));
        }
        match self {
            SurfaceTension::Euclidean { n } => {
                let mut m = vec![0.0; n * n];
                for i in 0..*n {
                    m[i * n + i] = s;
                }
                Self::quadratic(*n, &m)
            }
            SurfaceTension::Quadratic(q) => {
                let m: Vec<f64> = (0..q.n * q.n).map(|k| s * q.a[(k / q.n, k % q.n)]).collect();
                Self::quadratic(q.n, &m)
            }
            SurfaceTension::Crystalline(c) => {
                Self::crystalline(c.points.iter().map(|p| p.iter().map(|v| v * s).collect()).collect())
            }
            SurfaceTension::PerturbedEuclidean2D(_) => Err(Error::Unsupported(
                "perturbed tensions carry unit leading coefficient; scale a quadratic instead".into(),
            )),
        }
    }

    /// `f(nu)`; `f(0) = 0`.
    pub fn eval(&self, nu: &[f64]) -> f64 {
        if nu.len() == 2 {
            return self.eval2([nu[0], nu[1]]);
        }
        match self {
            SurfaceTension::Euclidean { .. } => nu.iter().map(|v| v * v).sum::<f64>().sqrt(),
            SurfaceTension::Quadratic(q) => {
                let v = nalgebra::DVector::from_column_slice(nu);
                (&q.a * v).norm()
            }
            SurfaceTension::Crystalline(c) => c.support(nu),
            SurfaceTension::PerturbedEuclidean2D(_) => f64::NAN,
        }
    }

    /// Planar fast path of [`eval`](Self::eval).
    pub fn eval2(&self, nu: P2) -> f64 {
        let r = geometry::norm(nu);
        if r == 0.0 {
            return 0.0;
        }
        match self {
            SurfaceTension::Euclidean { .. } => r,
            SurfaceTension::Quadratic(q) => {
                let a = &q.a;
                let x = a[(0, 0)] * nu[0] + a[(0, 1)] * nu[1];
                let y = a[(1, 0)] * nu[0] + a[(1, 1)] * nu[1];
                x.hypot(y)
            }
            SurfaceTension::Crystalline(c) => c.support(&nu),
            SurfaceTension::PerturbedEuclidean2D(p) => r * p.angular(nu[1].atan2(nu[0])).0,
        }
    }

    /// `f_*(x) = sup { x . nu : f(nu) <= 1 }`.
    pub fn dual(&self, x: &[f64]) -> f64 {
        if x.len() == 2 {
            return self.dual2([x[0], x[1]]);
        }
        match self {
            SurfaceTension::Euclidean { .. } => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            SurfaceTension::Quadratic(q) => {
                let v = nalgebra::DVector::from_column_slice(x);
                (&q.a_inv * v).norm()
            }
            SurfaceTension::Crystalline(c) => c.gauge(x),
            SurfaceTension::PerturbedEuclidean2D(_) => f64::NAN,
        }
    }

    /// Planar fast path of [`dual`](Self::dual).
    pub fn dual2(&self, x: P2) -> f64 {
        let r = geometry::norm(x);
        if r == 0.0 {
            return 0.0;
        }
        match self {
            SurfaceTension::Euclidean { .. } => r,
            SurfaceTension::Quadratic(q) => {
                let b = &q.a_inv;
                let u = b[(0, 0)] * x[0] + b[(0, 1)] * x[1];
                let v = b[(1, 0)] * x[0] + b[(1, 1)] * x[1];
                u.hypot(v)
            }
            SurfaceTension::Crystalline(c) => c.gauge(&x),
            SurfaceTension::PerturbedEuclidean2D(p) => r * p.dual_angular(x[1].atan2(x[0])),
        }
    }

    /// Restriction `g(theta) = f(e(theta))` with its first two derivatives.
    /// Only defined for planar smooth tensions.
    pub fn angular(&self, theta: f64) -> Option<(f64, f64, f64)> {
        let (c, s) = (theta.cos(), theta.sin());
        match self {
            SurfaceTension::Euclidean { n: 2 } => Some((1.0, 0.0, 0.0)),
            SurfaceTension::Quadratic(q) if q.n == 2 => {
                let m = q.a.transpose() * &q.a;
                let e = [c, s];
                let ep = [-s, c];
                let quad = |a: P2, b: P2| {
                    a[0] * (m[(0, 0)] * b[0] + m[(0, 1)] * b[1]) + a[1] * (m[(1, 0)] * b[0] + m[(1, 1)] * b[1])
                };
                let qv = quad(e, e);
                let q1 = 2.0 * quad(e, ep);
                let q2 = 2.0 * (quad(ep, ep) - qv);
                let g = qv.sqrt();
                Some((g, q1 / (2.0 * g), q2 / (2.0 * g) - q1 * q1 / (4.0 * qv * g)))
            }
            SurfaceTension::PerturbedEuclidean2D(p) => Some(p.angular(theta)),
            _ => None,
        }
    }

    /// `grad f(e(theta)) = g e + g' e_perp` for planar smooth tensions.
    pub fn gradient_at_angle(&self, theta: f64) -> Option<P2> {
        let (g, g1, _) = self.angular(theta)?;
        let (c, s) = (theta.cos(), theta.sin());
        Some([g * c - g1 * s, g * s + g1 * c])
    }

    /// Directions (unit vectors) where `theta -> f_*(e(theta))` is not smooth.
    pub fn dual_kinks(&self) -> Vec<P2> {
        match self {
            SurfaceTension::Crystalline(CrystallineTension { geometry: CrystalGeometry::Planar { vertices, .. }, .. }) => {
                vertices.iter().map(|v| geometry::scale(*v, 1.0 / geometry::norm(*v))).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Wulff polygon vertices for planar crystalline tensions.
    pub fn wulff_polygon(&self) -> Option<&[P2]> {
        match self {
            SurfaceTension::Crystalline(CrystallineTension { geometry: CrystalGeometry::Planar { vertices, .. }, .. }) => {
                Some(vertices)
            }
            _ => None,
        }
    }

    /// Facet normals and support values of a planar crystalline Wulff shape.
    pub fn wulff_facets(&self) -> Option<&[(P2, f64)]> {
        match self {
            SurfaceTension::Crystalline(CrystallineTension { geometry: CrystalGeometry::Planar { facets, .. }, .. }) => {
                Some(facets)
            }
            _ => None,
        }
    }

    /// Half-widths of the Wulff box for n-dimensional crystalline box tensions.
    pub fn wulff_box_half_widths(&self) -> Option<&[f64]> {
        match self {
            SurfaceTension::Crystalline(CrystallineTension { geometry: CrystalGeometry::Box { half }, .. }) => Some(half),
            _ => None,
        }
    }

    /// `|K|` in the tension's own dimension.
    pub fn wulff_volume(&self) -> f64 {
        let n = self.dim();
        match self {
            SurfaceTension::Euclidean { .. } => crate::special::omega(n),
            SurfaceTension::Quadratic(q) => q.a.determinant().abs() * crate::special::omega(n),
            SurfaceTension::Crystalline(c) => match &c.geometry {
                CrystalGeometry::Planar { vertices, .. } => geometry::signed_area(vertices),
                CrystalGeometry::Box { half } => half.iter().map(|h| 2.0 * h).product(),
            },
            SurfaceTension::PerturbedEuclidean2D(p) => {
                let m = CERTIFICATE_GRID;
                let mut s = 0.0;
                for j in 0..m {
                    let (g, _, g2) = p.angular(2.0 * PI * j as f64 / m as f64);
                    s += g * (g + g2);
                }
                0.5 * s * 2.0 * PI / m as f64
            }
        }
    }
}

impl CrystallineTension {
    fn support(&self, nu: &[f64]) -> f64 {
        if nu.iter().all(|v| *v == 0.0) {
            return 0.0;
        }
        match &self.geometry {
            CrystalGeometry::Box { half } => half.iter().zip(nu).map(|(h, v)| h * v.abs()).sum(),
            CrystalGeometry::Planar { .. } => self
                .points
                .iter()
                .map(|p| p.iter().zip(nu).map(|(a, b)| a * b).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    fn gauge(&self, x: &[f64]) -> f64 {
        match &self.geometry {
            CrystalGeometry::Box { half } => half.iter().zip(x).map(|(h, v)| v.abs() / h).fold(0.0, f64::max),
            CrystalGeometry::Planar { facets, .. } => facets
                .iter()
                .map(|(nrm, h)| (nrm[0] * x[0] + nrm[1] * x[1]) / h)
                .fold(0.0, f64::max),
        }
    }
}

fn planar_crystal(points: &[Vec<f64>]) -> Result<CrystalGeometry> {
    let pts: Vec<P2> = points.iter().map(|p| [p[0], p[1]]).collect();
    let support = |nu: P2| pts.iter().map(|p| geometry::dot(*p, nu)).fold(f64::NEG_INFINITY, f64::max);
    let mut planes = Vec::new();
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            if i == j {
                continue;
            }
            let d = geometry::sub(pts[j], pts[i]);
            let len = geometry::norm(d);
            if len == 0.0 {
                continue;
            }
            let nu = [d[1] / len, -d[0] / len];
            planes.push((nu, support(nu)));
        }
    }
    let extent = pts.iter().map(|p| geometry::norm(*p)).fold(0.0, f64::max).max(1.0);
    let bound = 1e3 * extent;
    let poly = geometry::halfplane_intersection(&planes, bound);
    if poly.len() < 3 || poly.iter().any(|p| p[0].abs() >= 0.5 * bound || p[1].abs() >= 0.5 * bound) {
        return Err(Error::UnboundedWulff);
    }
    let m = poly.len();
    let mut facets = Vec::with_capacity(m);
    for k in 0..m {
        let en = geometry::edge_normal(poly[k], poly[(k + 1) % m]);
        let nu = geometry::scale(en, 1.0 / geometry::norm(en));
        facets.push((nu, support(nu)));
    }
    let tol = 1e-12 * extent;
    if facets.iter().any(|(_, h)| *h <= tol) {
        return Err(Error::InvalidTension("crystalline: origin is not interior to the convex hull".into()));
    }
    Ok(CrystalGeometry::Planar { vertices: poly, facets })
}

fn box_crystal(points: &[Vec<f64>]) -> Result<CrystalGeometry> {
    let n = points[0].len();
    let half: Vec<f64> = (0..n).map(|i| points.iter().map(|p| p[i].abs()).fold(0.0, f64::max)).collect();
    if half.iter().any(|h| *h <= 0.0) {
        return Err(Error::InvalidTension("crystalline: origin is not interior to the convex hull".into()));
    }
    let tol = 1e-12 * half.iter().copied().fold(0.0, f64::max);
    let mut corners = vec![false; 1 << n];
    for p in points {
        let mut mask = 0usize;
        for i in 0..n {
            if (p[i].abs() - half[i]).abs() > tol {
                return Err(Error::Unsupported(
                    "crystalline tensions in n >= 3 must be centered axis-aligned boxes".into(),
                ));
            }
            if p[i] > 0.0 {
                mask |= 1 << i;
            }
        }
        corners[mask] = true;
    }
    if !corners.iter().all(|&c| c) {
        return Err(Error::Unsupported("crystalline tensions in n >= 3 must list all box corners".into()));
    }
    Ok(CrystalGeometry::Box { half })
}

impl PerturbedTension {
    /// `(g, g', g'')` for `g(theta) = 1 + delta sum c_k cos(k theta)`.
    fn angular(&self, theta: f64) -> (f64, f64, f64) {
        let (mut g, mut g1, mut g2) = (1.0, 0.0, 0.0);
        for &(k, c) in &self.harmonics {
            let kf = k as f64;
            let (s, co) = (kf * theta).sin_cos();
            g += self.delta * c * co;
            g1 -= self.delta * c * kf * s;
            g2 -= self.delta * c * kf * kf * co;
        }
        (g, g1, g2)
    }

    /// `f_*(e(phi)) = max_theta cos(theta - phi) / g(theta)`.
    fn dual_angular(&self, phi: f64) -> f64 {
        let h = |t: f64| (t - phi).cos() / self.angular(t).0;
        let coarse = 48;
        let mut best = (f64::NEG_INFINITY, phi);
        for j in 0..=coarse {
            let t = phi - 0.5 * PI + PI * j as f64 / coarse as f64;
            let v = h(t);
            if v > best.0 {
                best = (v, t);
            }
        }
        // The maximizer is the unique zero of N(t) = -(sin g + cos g');
        // N'(t) = -cos (g + g'') < 0 on the admissible arc.
        let mut t = best.1;
        let step = PI / coarse as f64;
        for _ in 0..30 {
            let (g, g1, g2) = self.angular(t);
            let (s, c) = (t - phi).sin_cos();
            let num = s * g + c * g1;
            let den = c * (g + g2);
            if den <= 0.0 {
                break;
            }
            let dt = (num / den).clamp(-step, step);
            t -= dt;
            if dt.abs() < 1e-15 {
                break;
            }
        }
        let v = h(t);
        if v >= best.0 {
            v
        } else {
            best.0
        }
    }
}

/// A boundary sample of a Wulff shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub x: P2,
    pub normal: P2,
    pub w: f64,
}

/// Sampled (smooth) or polygonal (crystalline) planar Wulff shape.
#[derive(Debug, Clone)]
pub struct WulffShape {
    tension: SurfaceTension,
    samples: Vec<BoundarySample>,
    /// Normal angles of the samples; uniform for smooth tensions.
    angles: Option<Vec<f64>>,
    volume: f64,
    ell: f64,
    ell_cap: f64,
    polygon: Option<Vec<P2>>,
}

impl WulffShape {
    pub fn tension(&self) -> &SurfaceTension {
        &self.tension
    }
    pub fn samples(&self) -> &[BoundarySample] {
        &self.samples
    }
    /// Normal angles `theta_j = 2 pi j / M` of the samples, smooth tensions only.
    pub fn angles(&self) -> Option<&[f64]> {
        self.angles.as_deref()
    }
    pub fn volume(&self) -> f64 {
        self.volume
    }
    pub fn ell(&self) -> f64 {
        self.ell
    }
    pub fn ell_cap(&self) -> f64 {
        self.ell_cap
    }
    pub fn polygon_vertices(&self) -> Option<&[P2]> {
        self.polygon.as_deref()
    }
    pub fn is_smooth(&self) -> bool {
        self.angles.is_some()
    }
    /// `sum w f(nu)` over the samples.
    pub fn sampled_perimeter(&self) -> f64 {
        self.samples.iter().map(|s| s.w * self.tension.eval2(s.normal)).sum()
    }
    /// Boundary points; for polygons the vertices, otherwise the samples.
    pub fn boundary_polygon(&self) -> Vec<P2> {
        match &self.polygon {
            Some(v) => v.clone(),
            None => self.samples.iter().map(|s| s.x).collect(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "tension": self.tension,
            "volume": self.volume,
            "ell": self.ell,
            "ell_cap": self.ell_cap,
            "perimeter": self.sampled_perimeter(),
            "polygon_vertices": self.polygon,
            "samples": self.samples.iter().map(|s| [s.x[0], s.x[1], s.normal[0], s.normal[1], s.w]).collect::<Vec<_>>(),
        })
    }
}

/// `f(nu)` for any dimension.
pub fn eval_tension(f: &SurfaceTension, nu: &[f64]) -> f64 {
    f.eval(nu)
}

/// `f_*(x)` for any dimension.
pub fn eval_dual(f: &SurfaceTension, x: &[f64]) -> f64 {
    f.dual(x)
}

/// Builds the planar Wulff shape of `f` with `m` boundary samples.
pub fn build_wulff(f: &SurfaceTension, m: usize) -> Result<Arc<WulffShape>> {
    if m < 16 {
        return Err(Error::InvalidParams(format!("Wulff shapes need at least 16 samples, got {m}")));
    }
    if f.dim() != 2 {
        return Err(Error::Unsupported("Wulff shapes are built in the plane; use Shape::Box for n-d crystals".into()));
    }
    let (ell, ell_cap) = tension_range(f);
    if let Some(vertices) = f.wulff_polygon() {
        let vertices = vertices.to_vec();
        let k = vertices.len();
        let perim = geometry::perimeter_length(&vertices);
        let mut samples = Vec::with_capacity(m + k);
        for i in 0..k {
            let a = vertices[i];
            let b = vertices[(i + 1) % k];
            let len = geometry::dist(a, b);
            let pieces = ((m as f64 * len / perim).round() as usize).max(1);
            let en = geometry::edge_normal(a, b);
            let normal = geometry::scale(en, 1.0 / len);
            for p in 0..pieces {
                let t = (p as f64 + 0.5) / pieces as f64;
                samples.push(BoundarySample {
                    x: geometry::add(a, geometry::scale(geometry::sub(b, a), t)),
                    normal,
                    w: len / pieces as f64,
                });
            }
        }
        return Ok(Arc::new(WulffShape {
            tension: f.clone(),
            samples,
            angles: None,
            volume: geometry::signed_area(&vertices),
            ell,
            ell_cap,
            polygon: Some(vertices),
        }));
    }
    let dtheta = 2.0 * PI / m as f64;
    let mut samples = Vec::with_capacity(m);
    let mut angles = Vec::with_capacity(m);
    let mut twice_area = 0.0;
    for j in 0..m {
        let th = dtheta * j as f64;
        let (g, _, g2) = f.angular(th).expect("smooth planar tension");
        let x = f.gradient_at_angle(th).expect("smooth planar tension");
        let speed = g + g2;
        samples.push(BoundarySample { x, normal: [th.cos(), th.sin()], w: speed * dtheta });
        angles.push(th);
        twice_area += g * speed * dtheta;
    }
    Ok(Arc::new(WulffShape {
        tension: f.clone(),
        samples,
        angles: Some(angles),
        volume: 0.5 * twice_area,
        ell,
        ell_cap,
        polygon: None,
    }))
}

/// `(ell_f, L_f)`: extremes of `f` on the unit sphere.
pub fn tension_range(f: &SurfaceTension) -> (f64, f64) {
    match f {
        SurfaceTension::Euclidean { .. } => (1.0, 1.0),
        SurfaceTension::Quadratic(q) => q.singular,
        SurfaceTension::Crystalline(c) => match &c.geometry {
            CrystalGeometry::Box { half } => {
                (half.iter().copied().fold(f64::INFINITY, f64::min), half.iter().map(|h| h * h).sum::<f64>().sqrt())
            }
            CrystalGeometry::Planar { vertices, facets } => (
                facets.iter().map(|f| f.1).fold(f64::INFINITY, f64::min),
                vertices.iter().map(|v| geometry::norm(*v)).fold(0.0, f64::max),
            ),
        },
        SurfaceTension::PerturbedEuclidean2D(p) => {
            let m = CERTIFICATE_GRID;
            let g = |t: f64| p.angular(t).0;
            let grid: Vec<f64> = (0..m).map(|j| g(2.0 * PI * j as f64 / m as f64)).collect();
            let h = 2.0 * PI / m as f64;
            let refine = |sign: f64| {
                let (j, _) = grid
                    .iter()
                    .enumerate()
                    .max_by(|a, b| (sign * a.1).total_cmp(&(sign * b.1)))
                    .expect("nonempty grid");
                let c = h * j as f64;
                let x = golden_max(|t| sign * g(t), c - h, c + h);
                g(x)
            };
            (refine(-1.0), refine(1.0))
        }
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const RESP: f64 = 0.381_966_011_250_105_1;
    let mut x1 = a + RESP * (b - a);
    let mut x2 = b - RESP * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + RESP * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - RESP * (b - a);
            f2 = f(x2);
        }
    }
    if f1 > f2 {
        x1
    } else {
        x2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_l1() -> SurfaceTension {
        SurfaceTension::scaled_l1(2, 0.5).unwrap()
    }

    #[test]
    fn tension_examples() {
        assert_eq!(SurfaceTension::euclidean(2).unwrap().eval(&[3.0, 4.0]), 5.0);
        assert_eq!(half_l1().eval(&[1.0, 0.0]), 0.5);
        let q = SurfaceTension::diagonal(&[1.0, 2.0]).unwrap();
        assert!((q.eval(&[0.0, 1.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn dual_examples() {
        assert!((SurfaceTension::euclidean(2).unwrap().dual(&[0.6, 0.8]) - 1.0).abs() < 1e-15);
        assert!((half_l1().dual(&[0.5, 0.3]) - 1.0).abs() < 1e-15);
        let q = SurfaceTension::diagonal(&[1.0, 2.0]).unwrap();
        assert!((q.dual(&[1.0, 0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn square_wulff_shape() {
        let k = build_wulff(&half_l1(), 64).unwrap();
        let v = k.polygon_vertices().unwrap();
        assert_eq!(v.len(), 4);
        assert!((k.volume() - 1.0).abs() < 1e-15);
        assert!(v.iter().all(|p| (p[0].abs() - 0.5).abs() < 1e-15 && (p[1].abs() - 0.5).abs() < 1e-15));
    }

    #[test]
    fn smooth_wulff_volumes() {
        let disk = build_wulff(&SurfaceTension::euclidean(2).unwrap(), 256).unwrap();
        assert!((disk.volume() - PI).abs() < 1e-4);
        let ell = build_wulff(&SurfaceTension::diagonal(&[1.0, 2.0]).unwrap(), 256).unwrap();
        assert!((ell.volume() - 2.0 * PI).abs() < 1e-4);
    }

    #[test]
    fn ranges() {
        assert_eq!(tension_range(&SurfaceTension::euclidean(2).unwrap()), (1.0, 1.0));
        let (l, u) = tension_range(&half_l1());
        assert!((l - 0.5).abs() < 1e-15 && (u - 0.5f64.sqrt()).abs() < 1e-15);
        let (l, u) = tension_range(&SurfaceTension::diagonal(&[1.0, 2.0]).unwrap());
        assert!((l - 1.0).abs() < 1e-14 && (u - 2.0).abs() < 1e-14);
    }

    #[test]
    fn collinear_points_give_unbounded_wulff() {
        let f = SurfaceTension::crystalline(vec![vec![-1.0, 0.0], vec![1.0, 0.0]]);
        assert!(matches!(f, Err(Error::UnboundedWulff)));
    }

    #[test]
    fn origin_outside_hull_rejected() {
        let f = SurfaceTension::crystalline(vec![vec![1.0, 0.0], vec![2.0, 0.0], vec![1.0, 1.0]]);
        assert!(f.is_err());
    }

    #[test]
    fn large_perturbation_fails_certificate() {
        let f = SurfaceTension::perturbed(0.1, vec![(4, 1.0)]);
        assert!(matches!(f, Err(Error::NotConvex { .. })));
        assert!(SurfaceTension::perturbed(0.05, vec![(4, 1.0)]).is_ok());
    }

    #[test]
    fn json_round_trip() {
        for f in [
            SurfaceTension::euclidean(2).unwrap(),
            SurfaceTension::diagonal(&[1.0, 2.0]).unwrap(),
            half_l1(),
            SurfaceTension::perturbed(0.03, vec![(3, 1.0), (6, -0.5)]).unwrap(),
        ] {
            let s = serde_json::to_string(&f).unwrap();
            let back: SurfaceTension = serde_json::from_str(&s).unwrap();
            assert_eq!(back, f, "{s}");
        }
        let bad = serde_json::from_str::<SurfaceTension>(r#"{"variant":"euclidean","n":2,"extra":1}"#);
        assert!(bad.is_err());
    }
}

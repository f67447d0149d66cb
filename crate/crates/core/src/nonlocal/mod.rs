//! Riesz potentials `v_E`, interaction energies `V(E)` and `V_f(E)`, and the
//! dual-norm potentials `U_i(E)`.
//!
//! Singular kernels are never sampled near their singularity. Potentials are
//! radial fans about the evaluation point with the radial integral done in
//! closed form ([`fan`]); planar `V` is a double boundary integral
//! ([`boundary`]); boxes use a pyramid decomposition ([`boxes`]).
//! [`oracle`] is an independent Monte Carlo estimator for cross-checks.

pub mod ball;
pub mod boundary;
pub mod boxes;
pub mod dual;
pub mod fan;
pub mod grid;
pub mod oracle;

use crate::anisotropy::SurfaceTension;
use crate::error::{Error, Result};
use crate::geometry::{self, P2};
use crate::quadrature::{AdaptiveTol, Estimate, GaussLegendre};
use crate::shapes::{self, GridMask, Shape};
use crate::special;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use dual::{DualKind, DualReport};
pub use fan::Kernel;
pub use oracle::McEstimate;

/// Exponents and the mass / nonlocal weight of an energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyParams {
    pub n: usize,
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confinement_radius: Option<f64>,
}

fn default_beta() -> f64 {
    1.0
}

impl EnergyParams {
    pub fn with_epsilon(n: usize, alpha: f64, epsilon: f64) -> Result<Self> {
        let p = Self { n, alpha, beta: 1.0, mass: None, epsilon: Some(epsilon), confinement_radius: None };
        p.validate()?;
        Ok(p)
    }

    pub fn with_mass(n: usize, alpha: f64, mass: f64) -> Result<Self> {
        let p = Self { n, alpha, beta: 1.0, mass: Some(mass), epsilon: None, confinement_radius: None };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidParams("dimension must be positive".into()));
        }
        check_alpha(self.alpha, self.n)?;
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidExponent(format!("beta must lie in (0, inf), got {}", self.beta)));
        }
        match (self.mass, self.epsilon) {
            (Some(m), None) if m > 0.0 && m.is_finite() => {}
            (None, Some(e)) if e >= 0.0 && e.is_finite() => {}
            (Some(_), Some(_)) => return Err(Error::InvalidParams("give exactly one of mass and epsilon".into())),
            (None, None) => return Err(Error::InvalidParams("one of mass and epsilon is required".into())),
            _ => return Err(Error::InvalidParams("mass must be positive and epsilon nonnegative".into())),
        }
        if let Some(r) = self.confinement_radius {
            if !(r > 0.0) {
                return Err(Error::InvalidParams("confinement radius must be positive".into()));
            }
        }
        Ok(())
    }

    /// `(n + 1 - alpha) / n`, the exponent in `eps = m^{(n+1-alpha)/n}`.
    pub fn scaling_exponent(&self) -> f64 {
        (self.n as f64 + 1.0 - self.alpha) / self.n as f64
    }

    pub fn epsilon(&self) -> f64 {
        match (self.epsilon, self.mass) {
            (Some(e), _) => e,
            (None, Some(m)) => m.powf(self.scaling_exponent()),
            _ => f64::NAN,
        }
    }

    pub fn mass(&self) -> f64 {
        match (self.mass, self.epsilon) {
            (Some(m), _) => m,
            (None, Some(e)) => e.powf(1.0 / self.scaling_exponent()),
            _ => f64::NAN,
        }
    }
}

/// Quadrature controls shared by the nonlocal evaluations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    /// Relative tolerance of the adaptive one-dimensional rules.
    pub rel_tol: f64,
    /// Panel cap of each adaptive angular (fan) integral.
    pub angular_panels: usize,
    /// Gauss-Legendre order of the triangulated outer rule.
    pub outer_nodes: usize,
    /// Uniform 4-way refinements of each triangle in the outer rule.
    pub outer_levels: usize,
    /// Gauss-Legendre order on box faces.
    pub box_nodes: usize,
    /// Minimum number of boundary evaluation points for residual profiles.
    pub boundary_samples: usize,
    pub mc_samples: u64,
    pub seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            angular_panels: 400,
            outer_nodes: 6,
            outer_levels: 2,
            box_nodes: 16,
            boundary_samples: 256,
            mc_samples: 10_000_000,
            seed: 20_240_917,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParams("quadrature tolerance must be positive".into()));
        }
        if self.outer_nodes == 0 || self.box_nodes == 0 || self.angular_panels == 0 {
            return Err(Error::InvalidParams("node counts must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn fan_tol(&self) -> AdaptiveTol {
        AdaptiveTol { rel: self.rel_tol, abs: 0.0, max_panels: self.angular_panels }
    }
}

fn check_alpha(alpha: f64, n: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha < n as f64) {
        return Err(Error::InvalidExponent(format!("alpha must lie in (0, {n}), got {alpha}")));
    }
    Ok(())
}

/// `v <= n omega_n r^{n-alpha} / (n - alpha)` with `omega_n r^n = |E|`.
pub fn within_ball_bound(v: f64, n: usize, alpha: f64, volume: f64) -> bool {
    let r = (volume / special::omega(n)).powf(1.0 / n as f64);
    v <= special::ball_center_potential(n, alpha, r) * (1.0 + 1e-6)
}

// ------------------------------------------------------------- fan domains

pub(crate) struct Curve {
    points: Vec<P2>,
    tangents: Vec<P2>,
    max_edge: f64,
}

/// Planar region prepared for repeated fan integrals.
pub(crate) enum FanDomain {
    Loops(Vec<Vec<P2>>),
    Star { polygon: Vec<P2>, curve: Curve },
    Disk { center: P2, radius: f64 },
    Grid(GridMask),
}

impl FanDomain {
    pub(crate) fn new(e: &Shape) -> Result<Self> {
        if e.dim() != 2 {
            return Err(Error::Unsupported(format!("fan integrals of a {}-d {}", e.dim(), e.name())));
        }
        Ok(match e {
            Shape::Polygon(_) | Shape::MultiPolygon(_) | Shape::Box(_) => {
                FanDomain::Loops(e.polygons().unwrap().iter().map(|p| p.vertices().to_vec()).collect())
            }
            Shape::Star(s) => {
                let points = s.points();
                let tangents = s.tangents();
                let max_edge = (0..points.len())
                    .map(|j| geometry::dist(points[j], points[(j + 1) % points.len()]))
                    .fold(0.0, f64::max);
                FanDomain::Star { polygon: points.clone(), curve: Curve { points, tangents, max_edge } }
            }
            Shape::Ball(b) => FanDomain::Disk { center: [b.center()[0], b.center()[1]], radius: b.radius() },
            Shape::Grid(g) => FanDomain::Grid(g.clone()),
        })
    }

    /// `int_E k(y - x) dy`.
    pub(crate) fn integrate(&self, kernel: &Kernel, x: P2, tol: AdaptiveTol) -> Estimate {
        match self {
            FanDomain::Loops(loops) => {
                let refs: Vec<&[P2]> = loops.iter().map(|l| l.as_slice()).collect();
                fan::polygon_fan(kernel, &refs, x, tol)
            }
            FanDomain::Star { polygon, curve } => {
                let gap = curve.points.iter().map(|p| geometry::dist(*p, x)).fold(f64::INFINITY, f64::min);
                if gap > 4.0 * curve.max_edge {
                    let est = fan::curve_fan(kernel, &curve.points, &curve.tangents, x);
                    if est.error <= 1e3 * tol.rel * est.value.abs().max(1e-300) {
                        return est;
                    }
                }
                fan::polygon_fan(kernel, &[polygon.as_slice()], x, tol)
            }
            FanDomain::Disk { center, radius } => fan::disk_fan(kernel, *center, *radius, x, tol),
            FanDomain::Grid(g) => match kernel {
                Kernel::Riesz { alpha } => grid::grid_potential(g, x, *alpha, tol),
                _ => {
                    let h = g.h();
                    let loops: Vec<[P2; 4]> = g
                        .occupied_cells()
                        .into_iter()
                        .map(|(i, j)| {
                            let c = g.cell_center(i, j);
                            let r = 0.5 * h;
                            [[c[0] - r, c[1] - r], [c[0] + r, c[1] - r], [c[0] + r, c[1] + r], [c[0] - r, c[1] + r]]
                        })
                        .collect();
                    let refs: Vec<&[P2]> = loops.iter().map(|l| l.as_slice()).collect();
                    fan::polygon_fan(kernel, &refs, x, tol)
                }
            },
        }
    }
}

// --------------------------------------------------------------- potentials

/// Riesz potential `v_E(x) = int_E |x - y|^{-alpha} dy`.
pub fn riesz_potential(e: &Shape, x: &[f64], alpha: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let n = e.dim();
    check_alpha(alpha, n)?;
    if x.len() != n {
        return Err(Error::InvalidParams(format!("point of dimension {} for a {n}-d shape", x.len())));
    }
    let vol = shapes::volume(e);
    if !(vol > 0.0) {
        return Err(Error::InvalidShape("potential of a null set".into()));
    }
    let est = match e {
        Shape::Box(b) if n >= 3 => boxes::box_potential(b.sides(), x, alpha, spec.box_nodes),
        Shape::Ball(b) if n >= 3 => {
            let r = b.center().iter().zip(x).map(|(c, y)| (y - c) * (y - c)).sum::<f64>().sqrt();
            ball::ball_potential(n, b.radius(), r, alpha, spec.rel_tol)
        }
        _ => FanDomain::new(e)?.integrate(&Kernel::Riesz { alpha }, [x[0], x[1]], spec.fan_tol()),
    };
    debug_assert!(
        within_ball_bound(est.value - est.error, n, alpha, vol),
        "potential {} exceeds the ball bound for |E| = {vol}",
        est.value
    );
    Ok(est)
}

// ------------------------------------------------------ interaction energies

/// `int_E int_E |x - y|^{-a}` for any `a < n` (negative `a` gives moments).
fn interaction_with_exponent(e: &Shape, a: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if e.is_empty() {
        return Ok(Estimate::exact(0.0));
    }
    Ok(match e {
        Shape::Box(b) => boxes::box_interaction(b.sides(), a, spec.box_nodes),
        Shape::Ball(b) => ball::ball_interaction(b.dim(), b.radius(), a, spec.rel_tol),
        Shape::Polygon(_) | Shape::MultiPolygon(_) | Shape::Star(_) => {
            let polys = e.polygons().unwrap();
            let loops: Vec<&[P2]> = polys.iter().map(|p| p.vertices()).collect();
            boundary::double_boundary(&loops, a, spec.rel_tol)
        }
        Shape::Grid(g) => grid::grid_interaction(g, a, spec.rel_tol),
    })
}

/// `V(E) = int_E int_E |x - y|^{-alpha}`.
pub fn interaction_energy(e: &Shape, alpha: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_alpha(alpha, e.dim())?;
    interaction_with_exponent(e, alpha, spec)
}

/// Triangles covering a planar polygonal shape.
fn triangles_of(e: &Shape) -> Result<Vec<[P2; 3]>> {
    let polys = e
        .polygons()
        .ok_or_else(|| Error::Unsupported(format!("triangulated quadrature over a {}", e.name())))?;
    let mut out = Vec::new();
    for p in &polys {
        let v = p.vertices();
        for t in geometry::triangulate(v) {
            out.push([v[t[0]], v[t[1]], v[t[2]]]);
        }
    }
    Ok(out)
}

fn refine(tris: Vec<[P2; 3]>, levels: usize) -> Vec<[P2; 3]> {
    let mut cur = tris;
    for _ in 0..levels {
        let mut next = Vec::with_capacity(4 * cur.len());
        for [a, b, c] in cur {
            let mid = |p: P2, q: P2| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
            let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
            next.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        cur = next;
    }
    cur
}

/// Collapsed-square Gauss rule on a triangle.
fn triangle_nodes(t: &[P2; 3], rule: &GaussLegendre) -> Vec<(P2, f64)> {
    let [a, b, c] = *t;
    let area2 = geometry::cross(geometry::sub(b, a), geometry::sub(c, a)).abs();
    let mut out = Vec::with_capacity(rule.len() * rule.len());
    for (xi, wx) in rule.mapped(0.0, 1.0) {
        for (eta, wy) in rule.mapped(0.0, 1.0) {
            let p = [
                a[0] + xi * ((1.0 - eta) * (b[0] - a[0]) + eta * (c[0] - a[0])),
                a[1] + xi * ((1.0 - eta) * (b[1] - a[1]) + eta * (c[1] - a[1])),
            ];
            out.push((p, wx * wy * xi * area2));
        }
    }
    out
}

fn outer_rule(e: &Shape, q: usize, levels: usize) -> Result<Vec<(P2, f64)>> {
    if let Shape::Ball(b) = e {
        if b.dim() != 2 {
            return Err(Error::Unsupported("outer quadrature over balls in n >= 3".into()));
        }
        // Polar rule: Gauss in r on 2^levels panels, trapezoid in theta.
        let rule = GaussLegendre::new(q);
        let c = b.center();
        let panels = 1usize << levels;
        let m = 8 * q * panels;
        let mut out = Vec::new();
        for k in 0..panels {
            let r0 = b.radius() * k as f64 / panels as f64;
            let r1 = b.radius() * (k + 1) as f64 / panels as f64;
            for (r, wr) in rule.mapped(r0, r1) {
                for j in 0..m {
                    let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
                    out.push(([c[0] + r * th.cos(), c[1] + r * th.sin()], wr * r * 2.0 * std::f64::consts::PI / m as f64));
                }
            }
        }
        return Ok(out);
    }
    let rule = GaussLegendre::new(q);
    Ok(refine(triangles_of(e)?, levels).iter().flat_map(|t| triangle_nodes(t, &rule)).collect())
}

fn outer_sum(dom: &FanDomain, kernel: &Kernel, nodes: &[(P2, f64)], tol: AdaptiveTol) -> (f64, f64) {
    let parts: Vec<(f64, f64)> = nodes
        .par_iter()
        .map(|(p, w)| {
            let v = dom.integrate(kernel, *p, tol);
            (w * v.value, w * v.error)
        })
        .collect();
    (parts.iter().map(|p| p.0).sum(), parts.iter().map(|p| p.1).sum())
}

/// `int_E (int_E k(y - x) dy) dx` by an outer Gauss rule over a triangulation
/// of `E`, with the error estimated by doubling the outer order.
pub fn outer_interaction(e: &Shape, kernel: &Kernel, spec: &QuadratureSpec) -> Result<Estimate> {
    let dom = FanDomain::new(e)?;
    let tol = spec.fan_tol();
    let coarse = outer_rule(e, spec.outer_nodes, spec.outer_levels)?;
    let fine = outer_rule(e, 2 * spec.outer_nodes, spec.outer_levels)?;
    let (vc, _) = outer_sum(&dom, kernel, &coarse, tol);
    let (vf, inner_err) = outer_sum(&dom, kernel, &fine, tol);
    Ok(Estimate { value: vf, error: (vf - vc).abs() + inner_err, converged: true })
}

/// `V(E)` through the triangulated outer rule; an independent route to
/// [`interaction_energy`] on planar shapes.
pub fn interaction_energy_outer(e: &Shape, alpha: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_alpha(alpha, e.dim())?;
    outer_interaction(e, &Kernel::Riesz { alpha }, spec)
}

/// `V_f(E) = int_E int_E f_*(x - y)^{-alpha}`.
pub fn interaction_energy_aniso(e: &Shape, f: &SurfaceTension, alpha: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_alpha(alpha, e.dim())?;
    if f.dim() != e.dim() {
        return Err(Error::InvalidParams("tension and shape dimensions differ".into()));
    }
    if let SurfaceTension::Euclidean { .. } = f {
        return interaction_energy(e, alpha, spec);
    }
    if e.dim() != 2 {
        return Err(Error::Unsupported("anisotropic interaction in n >= 3".into()));
    }
    if matches!(e, Shape::Grid(_)) {
        return Err(Error::Unsupported("anisotropic interaction of grid masks".into()));
    }
    outer_interaction(e, &Kernel::DualPower { f, p: -alpha }, spec)
}

// ------------------------------------------------------------ dual potentials

/// `U_i(E)`; the inner optimization over `y` starts at the barycenter.
pub fn dual_potential(e: &Shape, f: &SurfaceTension, kind: DualKind, spec: &QuadratureSpec) -> Result<DualReport> {
    if e.dim() != 2 || f.dim() != 2 {
        return Err(Error::Unsupported("dual potentials are planar".into()));
    }
    match kind {
        DualKind::U1 { alpha } => check_alpha(alpha, 2)?,
        DualKind::U2 { beta } if !(beta > 0.0 && beta.is_finite()) => {
            return Err(Error::InvalidExponent(format!("beta must lie in (0, inf), got {beta}")))
        }
        _ => {}
    }
    if !(shapes::volume(e) > 0.0) {
        return Err(Error::InvalidShape("dual potential of a null set".into()));
    }
    let dom = FanDomain::new(e)?;
    let kernel = kind.kernel(f);
    let b = shapes::barycenter(e);
    let bbox = e.bounding_box()?;
    Ok(dual::optimize(&dom, &kernel, kind, [b[0], b[1]], bbox, shapes::diameter(e), spec.fan_tol(), 4000))
}

/// Inner integral `int_E k_i(x - y) dx` at a fixed center `y`.
pub fn dual_integral(e: &Shape, f: &SurfaceTension, kind: DualKind, y: P2, spec: &QuadratureSpec) -> Result<Estimate> {
    let dom = FanDomain::new(e)?;
    Ok(dom.integrate(&kind.kernel(f), y, spec.fan_tol()))
}

// --------------------------------------------------------------- diagnostics

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstancyReport {
    pub max: f64,
    pub min: f64,
    pub residual: f64,
    pub error: f64,
    pub samples: usize,
}

/// Boundary points for residual profiles, at least `min_samples` of them.
pub fn residual_points(e: &Shape, min_samples: usize) -> Result<Vec<shapes::BoundaryPoint>> {
    let per_edge = match e {
        Shape::Polygon(_) | Shape::MultiPolygon(_) | Shape::Box(_) => {
            let edges: usize = e.polygons().map(|v| v.iter().map(|p| p.vertices().len()).sum()).unwrap_or(1);
            min_samples.div_ceil(edges.max(1))
        }
        _ => min_samples,
    };
    e.boundary_points(per_edge)
}

/// Spread of `v_E` over boundary samples.
pub fn potential_constancy_residual(e: &Shape, alpha: f64, spec: &QuadratureSpec) -> Result<ConstancyReport> {
    check_alpha(alpha, e.dim())?;
    let pts = residual_points(e, spec.boundary_samples)?;
    let dom = FanDomain::new(e)?;
    let kernel = Kernel::Riesz { alpha };
    let tol = spec.fan_tol();
    let vals: Vec<Estimate> = pts.par_iter().map(|p| dom.integrate(&kernel, p.x, tol)).collect();
    let max = vals.iter().map(|v| v.value).fold(f64::NEG_INFINITY, f64::max);
    let min = vals.iter().map(|v| v.value).fold(f64::INFINITY, f64::min);
    let error = vals.iter().map(|v| v.error).fold(0.0, f64::max);
    Ok(ConstancyReport { max, min, residual: max - min, error: 2.0 * error, samples: pts.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub gap: f64,
    pub bound: f64,
    pub constant: f64,
    pub mass: f64,
    pub symmetric_difference: f64,
    pub holds: bool,
}

/// `|V(E) - V(F)| <= c_{n,alpha} m^{(n-alpha)/n} |E sym-diff F|` with `m = max(|E|, |F|)`.
pub fn lipschitz_gap_bound(e: &Shape, f: &Shape, alpha: f64, spec: &QuadratureSpec) -> Result<LipschitzReport> {
    let n = e.dim();
    check_alpha(alpha, n)?;
    let sym = shapes::symmetric_difference_area(e, f)?.max(0.0);
    let m = shapes::volume(e).max(shapes::volume(f));
    let c = special::c_n_alpha(n, alpha);
    let bound = c * m.powf((n as f64 - alpha) / n as f64) * sym;
    let ve = interaction_energy(e, alpha, spec)?;
    let vf = interaction_energy(f, alpha, spec)?;
    let gap = (ve.value - vf.value).abs();
    // Equal shapes are compared exactly; otherwise allow quadrature error.
    let holds = gap <= bound + ve.error + vf.error;
    Ok(LipschitzReport { gap, bound, constant: c, mass: m, symmetric_difference: sym, holds })
}

/// `2 omega_{n-1} int_E int_E |x - y|^{1-alpha}` for planar `E`, `alpha in (0, 2)`.
pub fn slicing_interaction_lhs(e: &Shape, alpha: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if e.dim() != 2 {
        return Err(Error::Unsupported("the slicing bound is planar".into()));
    }
    check_alpha(alpha, 2)?;
    Ok(interaction_with_exponent(e, alpha - 1.0, spec)?.scale(2.0 * special::omega(1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::Polygon;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn params_derive_each_other() {
        let p = EnergyParams::with_mass(2, 1.0, 0.25).unwrap();
        assert!((p.epsilon() - 0.25f64.powf(1.0)).abs() < 1e-15);
        let q = EnergyParams::with_epsilon(3, 1.0, 0.5).unwrap();
        assert!((q.mass().powf(q.scaling_exponent()) - 0.5).abs() < 1e-14);
        assert!(EnergyParams::with_epsilon(2, 2.0, 0.1).is_err());
        let both = EnergyParams { mass: Some(1.0), ..q };
        assert!(both.validate().is_err());
    }

    #[test]
    fn ball_potentials() {
        let b1 = Shape::disk([0.0, 0.0], 1.0).unwrap();
        let v = riesz_potential(&b1, &[0.0, 0.0], 0.5, &spec()).unwrap().value;
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-9);
        let b2 = Shape::disk([0.0, 0.0], 2.0).unwrap();
        let v = riesz_potential(&b2, &[0.0, 0.0], 1.0, &spec()).unwrap().value;
        assert!((v - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn exponent_out_of_range() {
        let sq = Shape::unit_square();
        assert!(matches!(riesz_potential(&sq, &[0.5, 0.5], 2.0, &spec()), Err(Error::InvalidExponent(_))));
        assert!(interaction_energy(&sq, 0.0, &spec()).is_err());
    }

    #[test]
    fn square_routes_agree() {
        let sq = Shape::unit_square();
        let a = interaction_energy(&sq, 1.0, &spec()).unwrap().value;
        let b = interaction_energy_outer(&sq, 1.0, &spec()).unwrap().value;
        let c = interaction_energy(&Shape::rectangle(1.0).unwrap(), 1.0, &spec()).unwrap().value;
        assert!((a - c).abs() < 1e-10 * a, "{a} {c}");
        assert!((a - b).abs() < 1e-5 * a, "{a} {b}");
    }

    #[test]
    fn euclidean_aniso_matches_isotropic() {
        let tri = Shape::Polygon(Polygon::new(vec![[0.0, 0.0], [1.0, 0.2], [0.3, 0.9]]).unwrap());
        let f = SurfaceTension::euclidean(2).unwrap();
        let a = interaction_energy_aniso(&tri, &f, 0.7, &spec()).unwrap().value;
        let b = interaction_energy(&tri, 0.7, &spec()).unwrap().value;
        assert_eq!(a, b);
    }

    #[test]
    fn slicing_lhs_at_alpha_one() {
        let sq = Shape::unit_square().dilate(0.1);
        let v = slicing_interaction_lhs(&sq, 1.0, &spec()).unwrap().value;
        assert!((v - 4e-4).abs() < 1e-15);
        let w = slicing_interaction_lhs(&sq, 1.0 + 1e-9, &spec()).unwrap().value;
        assert!((w - 4e-4).abs() < 1e-10);
    }

    #[test]
    fn dual_potential_at_wulff_center() {
        let f = SurfaceTension::scaled_l1(2, 0.5).unwrap();
        let k = Shape::polygon(f.wulff_polygon().unwrap().to_vec()).unwrap();
        for kind in [DualKind::U1 { alpha: 0.5 }, DualKind::U2 { beta: 1.0 }, DualKind::U3] {
            let r = dual_potential(&k, &f, kind, &spec()).unwrap();
            let exact = kind.wulff_value(2, shapes::volume(&k));
            assert!((r.value - exact).abs() < 1e-8 * exact.abs(), "{kind:?} {r:?} {exact}");
            assert!(r.y_star[0].abs() < 1e-4 && r.y_star[1].abs() < 1e-4);
        }
    }
}

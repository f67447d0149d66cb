//! Total energies `P_f(E) + eps N(E)`, anisotropic curvature, Euler-Lagrange
//! residuals, first variations of the dual potentials, and related bounds.

use crate::anisotropy::{tension_range, SurfaceTension, WulffShape};
use crate::error::{Error, Result};
use crate::geometry::{self, P2};
use crate::nonlocal::{self, DualKind, EnergyParams, QuadratureSpec};
use crate::quadrature::Estimate;
use crate::shapes::{self, Shape, StarDomain, TrigInterpolant};
use crate::spectral;
use crate::special;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// The nonlocal term paired with the perimeter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "term", rename_all = "snake_case", deny_unknown_fields)]
pub enum NonlocalTerm {
    /// `V(E)` with exponent `params.alpha`.
    Riesz,
    /// `V_f(E)` with exponent `params.alpha`.
    RieszAniso,
    /// `U_i(E)`.
    Dual { i: u8 },
    None,
}

impl NonlocalTerm {
    pub fn dual_kind(&self, params: &EnergyParams) -> Option<DualKind> {
        match self {
            NonlocalTerm::Dual { i: 1 } => Some(DualKind::U1 { alpha: params.alpha }),
            NonlocalTerm::Dual { i: 2 } => Some(DualKind::U2 { beta: params.beta }),
            NonlocalTerm::Dual { i: 3 } => Some(DualKind::U3),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            NonlocalTerm::Riesz => "V".into(),
            NonlocalTerm::RieszAniso => "V_f".into(),
            NonlocalTerm::Dual { i } => format!("U_{i}"),
            NonlocalTerm::None => "none".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub perimeter: f64,
    pub nonlocal: f64,
    pub weight: f64,
    pub total: f64,
    /// Quadrature error estimate of `weight * nonlocal`.
    pub error: f64,
    pub term: NonlocalTerm,
    pub params: EnergyParams,
    /// `m^{(n-1)/n} * total`: the unscaled energy `P_f + V` of the dilate of
    /// `E` to volume `m` (meaningful for `|E| = 1`).
    pub mass_form_total: f64,
    /// Inside the confinement ball, when one is in force.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confined: Option<bool>,
}

/// `N(E)` with its error estimate.
pub fn nonlocal_value(
    e: &Shape,
    f: &SurfaceTension,
    term: NonlocalTerm,
    params: &EnergyParams,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    match term {
        NonlocalTerm::Riesz => nonlocal::interaction_energy(e, params.alpha, spec),
        NonlocalTerm::RieszAniso => nonlocal::interaction_energy_aniso(e, f, params.alpha, spec),
        NonlocalTerm::Dual { .. } => {
            let kind = term
                .dual_kind(params)
                .ok_or_else(|| Error::InvalidParams("dual potential index must be 1, 2 or 3".into()))?;
            let r = nonlocal::dual_potential(e, f, kind, spec)?;
            Ok(Estimate { value: r.value, error: r.error, converged: r.converged })
        }
        NonlocalTerm::None => Ok(Estimate::exact(0.0)),
    }
}

/// `P_f(E) + eps N(E)` with `eps = params.epsilon()`.
pub fn total_energy(
    e: &Shape,
    f: &SurfaceTension,
    term: NonlocalTerm,
    params: &EnergyParams,
    spec: &QuadratureSpec,
) -> Result<EnergyBreakdown> {
    params.validate()?;
    if params.n != e.dim() {
        return Err(Error::InvalidParams(format!("params for n = {} on a {}-d shape", params.n, e.dim())));
    }
    let perimeter = shapes::aniso_perimeter(e, f)?;
    let weight = params.epsilon();
    let nl = if weight == 0.0 { Estimate::exact(0.0) } else { nonlocal_value(e, f, term, params, spec)? };
    let total = perimeter + weight * nl.value;
    let n = params.n as f64;
    let confined = match params.confinement_radius {
        Some(_) => Some(is_confined(e, confinement_radius(f, params))?),
        None => None,
    };
    Ok(EnergyBreakdown {
        perimeter,
        nonlocal: nl.value,
        weight,
        total,
        error: weight * nl.error,
        term,
        params: params.clone(),
        mass_form_total: params.mass().powf((n - 1.0) / n) * total,
        confined,
    })
}

/// Unscaled `P_f(E) + V(E)` evaluated on `E` as given.
pub fn mass_form_energy(e: &Shape, f: &SurfaceTension, alpha: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(shapes::aniso_perimeter(e, f)? + nonlocal::interaction_energy(e, alpha, spec)?.value)
}

/// `c_{n,f} = 2 L_f |K|^{-1/n}`: the confinement ball `B_{c m^{1/n}}` holds the
/// Wulff shape of volume `m` with a factor-two margin.
pub fn confinement_constant(f: &SurfaceTension) -> f64 {
    let (_, cap) = tension_range(f);
    2.0 * cap * f.wulff_volume().powf(-1.0 / f.dim() as f64)
}

/// `c_0 = ell_f^n / (4^n L_f^n)`, the lower density constant; reported, never enforced.
pub fn density_constant(f: &SurfaceTension) -> f64 {
    let (ell, cap) = tension_range(f);
    (ell / (4.0 * cap)).powi(f.dim() as i32)
}

/// Radius of the confinement ball at rescaled volume one.
pub fn confinement_radius(f: &SurfaceTension, params: &EnergyParams) -> f64 {
    // In the rescaled problem |E| = 1, so c m^{1/n} becomes c.
    params.confinement_radius.unwrap_or_else(|| confinement_constant(f))
}

fn is_confined(e: &Shape, r: f64) -> Result<bool> {
    let pts: Vec<P2> = match e {
        Shape::Ball(b) => return Ok(b.center().iter().map(|c| c * c).sum::<f64>().sqrt() + b.radius() <= r),
        Shape::Box(b) => return Ok(0.5 * b.sides().iter().map(|s| s * s).sum::<f64>().sqrt() <= r),
        Shape::Grid(_) => {
            let (lo, hi) = e.bounding_box()?;
            vec![lo, hi, [lo[0], hi[1]], [hi[0], lo[1]]]
        }
        _ => e.polygons().unwrap().iter().flat_map(|p| p.vertices().to_vec()).collect(),
    };
    Ok(pts.iter().all(|p| geometry::norm(*p) <= r))
}

/// `n |E|^{(n-1)/n} |K|^{1/n}`, the Wulff lower bound on `P_f(E)`.
pub fn wulff_lower_bound(e: &Shape, f: &SurfaceTension) -> f64 {
    let n = e.dim() as f64;
    n * shapes::volume(e).powf((n - 1.0) / n) * f.wulff_volume().powf(1.0 / n)
}

// ------------------------------------------------------ crystalline families

/// `(a + 1/a) + eps V(R_a)` for `R_a = [a, 1/a]` and `f = |.|_1 / 2`.
pub fn rectangle_energy(a: f64, alpha: f64, eps: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParams(format!("rectangle aspect must be positive, got {a}")));
    }
    let v = if eps == 0.0 { 0.0 } else { rectangle_interaction(a, alpha, spec)? };
    Ok(a + 1.0 / a + eps * v)
}

/// `V(R_a)`.
pub fn rectangle_interaction(a: f64, alpha: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(nonlocal::interaction_energy(&Shape::rectangle(a)?, alpha, spec)?.value)
}

/// Central differences with one Richardson step: `(d/da, d^2/da^2)` of `g` at `a`.
pub fn richardson_derivatives(mut g: impl FnMut(f64) -> Result<f64>, a: f64, h: f64) -> Result<(f64, f64)> {
    let g0 = g(a)?;
    let (p1, m1) = (g(a + h)?, g(a - h)?);
    let (p2, m2) = (g(a + 0.5 * h)?, g(a - 0.5 * h)?);
    let d1_h = (p1 - m1) / (2.0 * h);
    let d1_h2 = (p2 - m2) / h;
    let d2_h = (p1 - 2.0 * g0 + m1) / (h * h);
    let d2_h2 = (p2 - 2.0 * g0 + m2) / (0.25 * h * h);
    Ok(((4.0 * d1_h2 - d1_h) / 3.0, (4.0 * d2_h2 - d2_h) / 3.0))
}

/// Step used for derivatives in the aspect ratio.
pub const ASPECT_STEP: f64 = 1e-3;

/// Spec with the tolerances tightened for difference quotients.
pub fn derivative_spec(spec: &QuadratureSpec) -> QuadratureSpec {
    QuadratureSpec { rel_tol: spec.rel_tol.min(1e-8), box_nodes: spec.box_nodes.max(16), ..spec.clone() }
}

/// `(d/da, d^2/da^2) E_{eps,f}(R_a)`.
pub fn rectangle_derivatives(a: f64, alpha: f64, eps: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let s = derivative_spec(spec);
    richardson_derivatives(|x| rectangle_energy(x, alpha, eps, &s), a, ASPECT_STEP)
}

/// `(d/da, d^2/da^2) V(R_a)`.
pub fn rectangle_interaction_derivatives(a: f64, alpha: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let s = derivative_spec(spec);
    richardson_derivatives(|x| rectangle_interaction(x, alpha, &s), a, ASPECT_STEP)
}

/// Box with free sides `s_1..s_{n-1}` and last side `1 / prod s_i`.
pub fn box_from_free_sides(free: &[f64]) -> Result<Shape> {
    let n = free.len() + 1;
    if !(2..=4).contains(&n) {
        return Err(Error::Unsupported(format!("box family in dimension {n} (supported: 2 to 4)")));
    }
    if free.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidParams("box sides must be positive".into()));
    }
    let mut sides = free.to_vec();
    sides.push(1.0 / free.iter().product::<f64>());
    Ok(Shape::Box(shapes::BoxShape::new(sides)?))
}

/// `sum_i prod_{j != i} s_j + eps V(box)`: the energy of the box with
/// `f = |.|_1 / 2`, whose facets each weigh `1/2`.
pub fn box_energy(free: &[f64], alpha: f64, eps: f64, spec: &QuadratureSpec) -> Result<f64> {
    let b = box_from_free_sides(free)?;
    let Shape::Box(bs) = &b else { unreachable!() };
    let sides = bs.sides();
    let n = sides.len();
    let perimeter: f64 = (0..n).map(|i| (0..n).filter(|&j| j != i).map(|j| sides[j]).product::<f64>()).sum();
    let v = if eps == 0.0 { 0.0 } else { nonlocal::interaction_energy(&b, alpha, spec)?.value };
    Ok(perimeter + eps * v)
}

// ------------------------------------------------------ curvature, residuals

fn require_smooth(f: &SurfaceTension) -> Result<()> {
    if !f.is_smooth() || f.dim() != 2 {
        return Err(Error::NonSmoothTension(f.name().into()));
    }
    Ok(())
}

/// `H^f_E = (g + g'')(phi) kappa` at the boundary samples of a smooth planar
/// curve, where `phi` is the normal angle and `kappa` the curvature;
/// derivatives along the curve are spectral.
pub fn aniso_curvature(e: &Shape, f: &SurfaceTension) -> Result<Vec<f64>> {
    require_smooth(f)?;
    match e {
        Shape::Star(s) => {
            let tan = s.tangents();
            let m = tan.len();
            let tx: Vec<f64> = tan.iter().map(|t| t[0]).collect();
            let ty: Vec<f64> = tan.iter().map(|t| t[1]).collect();
            let ax = spectral::derivative(&tx, 2.0 * PI, 1);
            let ay = spectral::derivative(&ty, 2.0 * PI, 1);
            Ok((0..m)
                .map(|j| {
                    let t = tan[j];
                    let speed = geometry::norm(t);
                    let kappa = geometry::cross(t, [ax[j], ay[j]]) / speed.powi(3);
                    let phi = (-t[0]).atan2(t[1]);
                    let (g, _, g2) = f.angular(phi).expect("smooth planar tension");
                    (g + g2) * kappa
                })
                .collect())
        }
        Shape::Ball(b) if b.dim() == 2 => {
            let pts = e.boundary_points(256)?;
            Ok(pts
                .iter()
                .map(|p| {
                    let phi = p.normal[1].atan2(p.normal[0]);
                    let (g, _, g2) = f.angular(phi).expect("smooth planar tension");
                    (g + g2) / b.radius()
                })
                .collect())
        }
        _ => Err(Error::Unsupported(format!(
            "pointwise anisotropic curvature of a {} (smooth curves only)",
            e.name()
        ))),
    }
}

/// One boundary sample of an Euler-Lagrange profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    /// Arclength from the first sample.
    pub s: f64,
    pub h_f: f64,
    pub v_e: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationReport {
    /// First variation along a star perturbation, when one was requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_variation: Option<f64>,
    pub profile: Vec<ProfileRow>,
    /// Surface-weighted mean of `g = H + eps v`.
    pub mu: f64,
    /// `max g - min g`.
    pub residual: f64,
    pub std_dev: f64,
    pub epsilon: f64,
    pub quadrature_error: f64,
}

/// `g = H^f_E + eps v_E` over the boundary samples of `E`.
pub fn el_residual(e: &Shape, f: &SurfaceTension, params: &EnergyParams, spec: &QuadratureSpec) -> Result<VariationReport> {
    params.validate()?;
    let h = aniso_curvature(e, f)?;
    let pts = match e {
        Shape::Ball(_) => e.boundary_points(256)?,
        _ => e.boundary_points(1)?,
    };
    debug_assert_eq!(h.len(), pts.len());
    let eps = params.epsilon();
    let vals: Vec<Estimate> = if eps == 0.0 {
        vec![Estimate::exact(0.0); pts.len()]
    } else {
        let dom = nonlocal::FanDomain::new(e)?;
        let kernel = nonlocal::Kernel::Riesz { alpha: params.alpha };
        let tol = spec.fan_tol();
        pts.par_iter().map(|p| dom.integrate(&kernel, p.x, tol)).collect()
    };
    let mut profile = Vec::with_capacity(pts.len());
    let mut s = 0.0;
    for (j, p) in pts.iter().enumerate() {
        if j > 0 {
            s += geometry::dist(pts[j - 1].x, p.x);
        }
        let g = h[j] + eps * vals[j].value;
        profile.push(ProfileRow { s, h_f: h[j], v_e: vals[j].value, g });
    }
    let wsum: f64 = pts.iter().map(|p| p.w).sum();
    let mu = profile.iter().zip(&pts).map(|(r, p)| r.g * p.w).sum::<f64>() / wsum;
    let var = profile.iter().zip(&pts).map(|(r, p)| (r.g - mu).powi(2) * p.w).sum::<f64>() / wsum;
    let max = profile.iter().map(|r| r.g).fold(f64::NEG_INFINITY, f64::max);
    let min = profile.iter().map(|r| r.g).fold(f64::INFINITY, f64::min);
    let qerr = eps * vals.iter().map(|v| v.error).fold(0.0, f64::max);
    Ok(VariationReport {
        first_variation: None,
        profile,
        mu,
        residual: max - min,
        std_dev: var.sqrt(),
        epsilon: eps,
        quadrature_error: qerr,
    })
}

// ------------------------------------------------- dual-potential variations

/// First variation of `U_i` at `K` along the normal offsets `u` on `dK`:
/// `sum w u` for `i = 1`, `-sum w u` for `i = 2`, and `0` for `i = 3`.
pub fn first_variation_ui(k: &WulffShape, u: &[f64], kind: DualKind) -> Result<f64> {
    if u.len() != k.samples().len() {
        return Err(Error::InvalidParams("offsets must match the Wulff samples".into()));
    }
    let flux: f64 = k.samples().iter().zip(u).map(|(s, v)| s.w * v).sum();
    Ok(match kind {
        DualKind::U1 { .. } => flux,
        DualKind::U2 { .. } => -flux,
        DualKind::U3 => 0.0,
    })
}

/// Central difference `(U_i(K_{tu}) - U_i(K_{-tu})) / 2t` on star domains.
pub fn first_variation_fd(
    k: &Arc<WulffShape>,
    u: &[f64],
    kind: DualKind,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let f = k.tension().clone();
    let at = |s: f64| -> Result<f64> {
        let star = StarDomain::new(k.clone(), u.iter().map(|v| s * v).collect())?;
        Ok(nonlocal::dual_potential(&Shape::Star(star), &f, kind, spec)?.value)
    };
    Ok((at(t)? - at(-t)?) / (2.0 * t))
}

// ---------------------------------------------------------------- Fuglede

/// Bound on `|u|_{C^1}` for the Fuglede-type diagnostic.
pub const FUGLEDE_C1_BOUND: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FugledeReport {
    /// `P_f(E) - P_f(K)` after volume and barycenter correction.
    pub deficit: f64,
    /// `|u|^2_{H^1(dK)}` of the corrected offsets.
    pub h1_squared: f64,
    /// `deficit / h1_squared`, `NaN` when degenerate.
    pub ratio: f64,
    pub degenerate: bool,
    /// Offsets of the corrected set as a graph over `dK`.
    pub corrected_u: Vec<f64>,
}

fn wrap(x: f64) -> f64 {
    let t = (x + PI).rem_euclid(2.0 * PI) - PI;
    if t == -PI {
        PI
    } else {
        t
    }
}

/// Offsets `u'` with `dE = {x + u'(x) nu_K(x)}` over the samples of `K`, by
/// Newton on the base angle of each normal line.
fn graph_offsets(e: &StarDomain) -> Vec<f64> {
    let base = e.base();
    let f = base.tension();
    let angles = base.angles().expect("smooth base").to_vec();
    let interp: TrigInterpolant = e.interpolant();
    angles
        .iter()
        .map(|&th| {
            let x = f.gradient_at_angle(th).unwrap();
            let nu = [th.cos(), th.sin()];
            let tau = [-nu[1], nu[0]];
            let residual = |psi: f64| geometry::dot(geometry::sub(e.point_at(psi, &interp), x), tau);
            let mut psi = th;
            for _ in 0..50 {
                let r = residual(psi);
                let h = 1e-6;
                let d = (residual(psi + h) - residual(psi - h)) / (2.0 * h);
                if d == 0.0 {
                    break;
                }
                let step = r / d;
                psi = wrap(psi - step);
                if step.abs() < 1e-15 {
                    break;
                }
            }
            geometry::dot(geometry::sub(e.point_at(psi, &interp), x), nu)
        })
        .collect()
}

/// Volume- and barycenter-corrected deficit against the `H^1(dK)` norm.
pub fn fuglede_ratio(k: &Arc<WulffShape>, u: &[f64]) -> Result<FugledeReport> {
    let norms = shapes::star_norms(u, k)?;
    if norms.c1() > FUGLEDE_C1_BOUND {
        return Err(Error::OutOfRegime { norm: norms.c1(), bound: FUGLEDE_C1_BOUND });
    }
    let f = k.tension();
    let kk = StarDomain::wulff(k.clone())?;
    let raw = StarDomain::new(k.clone(), u.to_vec())?;
    let s = (kk.area() / raw.area()).sqrt();
    let bk = geometry::scale(kk.first_moment(), 1.0 / kk.area());
    let be = geometry::scale(raw.first_moment(), 1.0 / raw.area());
    let shift = geometry::sub(bk, geometry::scale(be, s));
    let e = raw.with_transform(s, shift);
    let deficit = e.perimeter_f(f) - kk.perimeter_f(f);
    let corrected = graph_offsets(&e);
    let h1 = shapes::star_norms(&corrected, k)?.h1;
    let h1_squared = h1 * h1;
    let degenerate = h1_squared < 1e-24;
    Ok(FugledeReport {
        deficit,
        h1_squared,
        ratio: if degenerate { f64::NAN } else { deficit / h1_squared },
        degenerate,
        corrected_u: corrected,
    })
}

// --------------------------------------------------- splitting upper bound

/// `N^{1/n} |K|^{1/n} n + eps c_{n,alpha} N^{(alpha-n)/n}`: the energy bound
/// from `N` far-apart equal Wulff shapes.
pub fn split_bound_energy(components: u64, eps: f64, wulff_volume: f64, n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    let c = components as f64;
    c.powf(1.0 / nf) * wulff_volume.powf(1.0 / nf) * nf + eps * special::c_n_alpha(n, alpha) * c.powf((alpha - nf) / nf)
}

/// Exhaustive minimization of [`split_bound_energy`] over `1 <= N <= n_max`;
/// returns `(argmin, min)` with ties to the smallest `N`.
pub fn minimize_split_bound(eps: f64, wulff_volume: f64, n: usize, alpha: f64, n_max: u64) -> (u64, f64) {
    let mut best = (1, split_bound_energy(1, eps, wulff_volume, n, alpha));
    for c in 2..=n_max.max(1) {
        let v = split_bound_energy(c, eps, wulff_volume, n, alpha);
        if v < best.1 {
            best = (c, v);
        }
    }
    best
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anisotropy::build_wulff;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn rectangle_perimeter_part() {
        for a in [0.5, 1.0, 1.7] {
            let e = rectangle_energy(a, 1.0, 0.0, &spec()).unwrap();
            assert_eq!(e, a + 1.0 / a);
        }
        let (d1, d2) = richardson_derivatives(|a| Ok(a + 1.0 / a), 1.3, ASPECT_STEP).unwrap();
        assert!((d1 - (1.0 - 1.0 / 1.69)).abs() < 1e-9);
        assert!((d2 - 2.0 / 1.3f64.powi(3)).abs() < 1e-5);
    }

    #[test]
    fn box_family_reduces_to_rectangle() {
        let a = 1.3;
        let b = box_energy(&[a], 1.0, 0.1, &spec()).unwrap();
        let r = rectangle_energy(a, 1.0, 0.1, &spec()).unwrap();
        assert!((b - r).abs() < 1e-14);
        assert!((box_energy(&[1.0, 1.0], 1.0, 0.0, &spec()).unwrap() - 3.0).abs() < 1e-15);
        assert!(box_energy(&[1.0; 4], 1.0, 0.0, &spec()).is_err());
    }

    #[test]
    fn wulff_curvature_is_inverse_radius() {
        let f = SurfaceTension::diagonal(&[1.0, 2.0]).unwrap();
        let k = build_wulff(&f, 512).unwrap();
        let r = 1.7;
        let star = StarDomain::wulff(k).unwrap().with_transform(r, [0.0, 0.0]);
        let h = aniso_curvature(&Shape::Star(star), &f).unwrap();
        for v in h {
            assert!((v * r - 1.0).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn crystalline_curvature_rejected() {
        let f = SurfaceTension::scaled_l1(2, 0.5).unwrap();
        let d = Shape::disk([0.0, 0.0], 1.0).unwrap();
        assert!(matches!(aniso_curvature(&d, &f), Err(Error::NonSmoothTension(_))));
    }

    #[test]
    fn first_variation_formula_examples() {
        let f = SurfaceTension::euclidean(2).unwrap();
        let k = build_wulff(&f, 256).unwrap();
        let zero = vec![0.0; 256];
        assert_eq!(first_variation_ui(&k, &zero, DualKind::U1 { alpha: 0.5 }).unwrap(), 0.0);
        let c = vec![0.01; 256];
        let v = first_variation_ui(&k, &c, DualKind::U1 { alpha: 0.5 }).unwrap();
        assert!((v - 0.01 * 2.0 * PI).abs() < 1e-12);
        assert_eq!(first_variation_ui(&k, &c, DualKind::U3).unwrap(), 0.0);
    }

    #[test]
    fn fuglede_on_disk() {
        let f = SurfaceTension::euclidean(2).unwrap();
        let k = build_wulff(&f, 256).unwrap();
        let zero = fuglede_ratio(&k, &vec![0.0; 256]).unwrap();
        assert!(zero.degenerate && zero.ratio.is_nan() && zero.deficit.abs() < 1e-14);
        let dil = fuglede_ratio(&k, &vec![0.01; 256]).unwrap();
        assert!(dil.degenerate, "{}", dil.h1_squared);
        assert!(dil.deficit.abs() < 1e-12);
        let u: Vec<f64> = k.angles().unwrap().iter().map(|t| 0.01 * (2.0 * t).cos()).collect();
        let r = fuglede_ratio(&k, &u).unwrap();
        assert!(r.deficit > 0.0 && r.ratio > 0.1 && r.ratio < 10.0, "{r:?}");
        let big = vec![0.2; 256];
        assert!(matches!(fuglede_ratio(&k, &big), Err(Error::OutOfRegime { .. })));
    }

    #[test]
    fn split_bound_at_one_component() {
        let v = split_bound_energy(1, 0.3, 1.0, 2, 1.0);
        assert!((v - (2.0 + 0.3 * 4.0 * PI.sqrt())).abs() < 1e-14);
    }
}

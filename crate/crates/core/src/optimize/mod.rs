//! Minimizers over finite-dimensional shape families, parameter sweeps, and
//! the truncation non-optimality check.

pub mod golden;
pub mod simplex;
mod truncation;

pub use golden::{golden_section, GoldenResult};
pub use simplex::{nelder_mead, SimplexOptions, SimplexResult};
pub use truncation::{truncation_check, SplitOutcome, TruncationOptions, TruncationReport};

use crate::anisotropy::{build_wulff, SurfaceTension, WulffShape};
use crate::energy::{self, EnergyBreakdown, NonlocalTerm};
use crate::error::{Error, Result};
use crate::geometry::{self, P2};
use crate::nonlocal::{EnergyParams, QuadratureSpec};
use crate::shapes::{self, Polygon, Shape, StarDomain};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::Instant;

/// Bracket tolerance of the 1-d search.
pub const BRACKET_TOL: f64 = 1e-6;
/// Pre-scan nodes of the 1-d search.
pub const PRESCAN: usize = 64;
/// Random restarts of the simplex search.
pub const RESTARTS: usize = 5;
/// Seed of the restart generator.
pub const RESTART_SEED: u64 = 0x5eed_2024;
/// Most parameters a family may have.
pub const MAX_PARAMS: usize = 16;

/// Finite-dimensional shape families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeFamily {
    /// `R_a = [a, 1/a]` with `f = |.|_1 / 2`, `a` in `[lo, hi]`.
    Rectangle { lo: f64, hi: f64 },
    /// Boxes of volume one in `R^n` with free sides in `[lo, hi]`, `f = |.|_1 / 2`.
    BoxNd { n: usize, lo: f64, hi: f64 },
    /// Convex polygons `{x . nu_i <= h_i}` over the facet normals of a planar
    /// crystalline tension.
    PolygonFixedNormals,
    /// Graphs `x + u(x) nu_K(x)` over the Wulff shape with
    /// `u = sum_{k=2}^{k_max} a_k cos k theta + b_k sin k theta`, `|a_k|, |b_k| <= bound`.
    StarFourier {
        k_max: usize,
        #[serde(default = "default_coefficient_bound")]
        bound: f64,
        #[serde(default = "default_star_samples")]
        samples: usize,
    },
}

fn default_coefficient_bound() -> f64 {
    0.02
}

fn default_star_samples() -> usize {
    128
}

/// A family with its energy: tension, nonlocal term and parameters.
#[derive(Debug, Clone)]
pub struct Problem {
    pub family: ShapeFamily,
    pub tension: SurfaceTension,
    pub term: NonlocalTerm,
    pub params: EnergyParams,
    pub spec: QuadratureSpec,
    /// Volume every candidate is dilated to.
    pub target_volume: f64,
    wulff: Option<Arc<WulffShape>>,
}

impl Problem {
    pub fn new(
        family: ShapeFamily,
        tension: SurfaceTension,
        term: NonlocalTerm,
        params: EnergyParams,
        spec: QuadratureSpec,
    ) -> Result<Self> {
        params.validate()?;
        spec.validate()?;
        let mut wulff = None;
        match &family {
            ShapeFamily::Rectangle { lo, hi } => {
                if !(*lo > 0.0 && lo < hi && *lo <= 1.0 && *hi >= 1.0) {
                    return Err(Error::InvalidParams(format!("rectangle range [{lo}, {hi}] must lie in (0, inf) and contain 1")));
                }
                expect_l1(&tension, 2)?;
            }
            ShapeFamily::BoxNd { n, lo, hi } => {
                if !(2..=4).contains(n) {
                    return Err(Error::Unsupported(format!("box family in dimension {n} (supported: 2 to 4)")));
                }
                if !(*lo > 0.0 && lo < hi && *lo <= 1.0 && *hi >= 1.0) {
                    return Err(Error::InvalidParams(format!("box range [{lo}, {hi}] must lie in (0, inf) and contain 1")));
                }
                expect_l1(&tension, *n)?;
            }
            ShapeFamily::PolygonFixedNormals => {
                let facets = tension
                    .wulff_facets()
                    .ok_or_else(|| Error::InvalidParams("fixed-normal polygons need a planar crystalline tension".into()))?;
                if facets.len() > MAX_PARAMS {
                    return Err(Error::InvalidParams(format!("{} facet offsets exceed {MAX_PARAMS}", facets.len())));
                }
            }
            ShapeFamily::StarFourier { k_max, bound, samples } => {
                if *k_max < 2 || 2 * (k_max - 1) > MAX_PARAMS {
                    return Err(Error::InvalidParams(format!("k_max = {k_max} must be in 2..={}", MAX_PARAMS / 2 + 1)));
                }
                if !(*bound > 0.0) || *samples < 4 * k_max {
                    return Err(Error::InvalidParams("star family needs a positive bound and enough samples".into()));
                }
                wulff = Some(build_wulff(&tension, *samples)?);
            }
        }
        if params.n != family_dim(&family) {
            return Err(Error::InvalidParams(format!("params for n = {} on a {}-d family", params.n, family_dim(&family))));
        }
        Ok(Self { family, tension, term, params, spec, target_volume: 1.0, wulff })
    }

    pub fn dim(&self) -> usize {
        match &self.family {
            ShapeFamily::Rectangle { .. } => 1,
            ShapeFamily::BoxNd { n, .. } => n - 1,
            ShapeFamily::PolygonFixedNormals => self.tension.wulff_facets().unwrap().len(),
            ShapeFamily::StarFourier { k_max, .. } => 2 * (k_max - 1),
        }
    }

    /// Parameters of the Wulff shape within the family.
    pub fn wulff_parameters(&self) -> Vec<f64> {
        match &self.family {
            ShapeFamily::Rectangle { .. } => vec![1.0],
            ShapeFamily::BoxNd { n, .. } => vec![1.0; n - 1],
            ShapeFamily::PolygonFixedNormals => self.tension.wulff_facets().unwrap().iter().map(|f| f.1).collect(),
            ShapeFamily::StarFourier { .. } => vec![0.0; self.dim()],
        }
    }

    fn in_range(&self, x: &[f64]) -> bool {
        match &self.family {
            ShapeFamily::Rectangle { lo, hi } | ShapeFamily::BoxNd { lo, hi, .. } => {
                x.iter().all(|v| v >= lo && v <= hi)
            }
            ShapeFamily::PolygonFixedNormals => x.iter().all(|v| v.is_finite()),
            ShapeFamily::StarFourier { bound, .. } => x.iter().all(|v| v.abs() <= *bound),
        }
    }

    fn star_offsets(&self, x: &[f64]) -> Vec<f64> {
        let k = self.wulff.as_ref().unwrap();
        k.angles()
            .unwrap()
            .iter()
            .map(|&t| x.chunks(2).enumerate().map(|(j, c)| {
                let kk = (j + 2) as f64;
                c[0] * (kk * t).cos() + c[1] * (kk * t).sin()
            }).sum())
            .collect()
    }

    /// Shape for parameters `x`, dilated to the target volume (and recentered
    /// for polygons and stars).
    pub fn realize(&self, x: &[f64]) -> Result<Shape> {
        if x.len() != self.dim() {
            return Err(Error::InvalidParams(format!("expected {} parameters, got {}", self.dim(), x.len())));
        }
        if !self.in_range(x) {
            return Err(Error::InvalidParams(format!("parameters {x:?} outside the family range")));
        }
        match &self.family {
            ShapeFamily::Rectangle { .. } => Shape::rectangle(x[0]),
            ShapeFamily::BoxNd { .. } => {
                let b = energy::box_from_free_sides(x)?;
                shapes::rescale_to_volume(&b, self.target_volume)
            }
            ShapeFamily::PolygonFixedNormals => {
                let facets = self.tension.wulff_facets().unwrap();
                let planes: Vec<(P2, f64)> = facets.iter().zip(x).map(|(f, h)| (f.0, *h)).collect();
                let bound = 4.0 * x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                let poly = geometry::halfplane_intersection(&planes, bound);
                if poly.len() < 3 {
                    return Err(Error::InvalidShape("empty fixed-normal polygon".into()));
                }
                let p = Shape::Polygon(Polygon::new(poly)?);
                if shapes::volume(&p) <= 1e-300 {
                    return Err(Error::InvalidShape("degenerate fixed-normal polygon".into()));
                }
                recenter(&shapes::rescale_to_volume(&p, self.target_volume)?)
            }
            ShapeFamily::StarFourier { .. } => {
                let k = self.wulff.as_ref().unwrap();
                let u = self.star_offsets(x);
                let norms = shapes::star_norms(&u, k)?;
                if norms.c1() > energy::FUGLEDE_C1_BOUND {
                    return Err(Error::OutOfRegime { norm: norms.c1(), bound: energy::FUGLEDE_C1_BOUND });
                }
                let s = StarDomain::new(k.clone(), u)?;
                let a = s.area();
                let scale = (self.target_volume / a).sqrt();
                let b = geometry::scale(s.first_moment(), 1.0 / a);
                let kk = StarDomain::wulff(k.clone())?;
                let bk = geometry::scale(kk.first_moment(), 1.0 / kk.area());
                Ok(Shape::Star(s.with_transform(scale, geometry::sub(bk, geometry::scale(b, scale)))))
            }
        }
    }

    /// Energy breakdown at parameters `x`.
    pub fn evaluate(&self, x: &[f64]) -> Result<EnergyBreakdown> {
        let e = self.realize(x)?;
        energy::total_energy(&e, &self.tension, self.term, &self.params, &self.spec)
    }

    /// Objective value for the search: the total energy, `+inf` outside the family.
    fn objective(&self, x: &[f64]) -> f64 {
        match self.evaluate(x) {
            Ok(b) => b.total,
            Err(_) => f64::INFINITY,
        }
    }

    /// Maps `x` to the canonical representative of its shape (offsets of the
    /// dilated, recentered polygon); identity for the other families.
    pub fn normalize(&self, x: &[f64]) -> Result<Vec<f64>> {
        match &self.family {
            ShapeFamily::PolygonFixedNormals => {
                let e = self.realize(x)?;
                let verts = e.polygons().unwrap()[0].vertices().to_vec();
                let facets = self.tension.wulff_facets().unwrap();
                Ok(facets
                    .iter()
                    .map(|(nu, _)| verts.iter().map(|p| geometry::dot(*p, *nu)).fold(f64::NEG_INFINITY, f64::max))
                    .collect())
            }
            _ => Ok(x.to_vec()),
        }
    }

    /// Sup norm of the star offsets at `x` (StarFourier only).
    pub fn star_sup(&self, x: &[f64]) -> Option<f64> {
        match self.family {
            ShapeFamily::StarFourier { .. } => Some(self.star_offsets(x).iter().fold(0.0, |m, v| m.max(v.abs()))),
            _ => None,
        }
    }
}

fn family_dim(f: &ShapeFamily) -> usize {
    match f {
        ShapeFamily::BoxNd { n, .. } => *n,
        _ => 2,
    }
}

fn expect_l1(f: &SurfaceTension, n: usize) -> Result<()> {
    let half = f.wulff_box_half_widths().map(|h| h.to_vec()).or_else(|| {
        let v = f.wulff_polygon()?;
        let (lo, hi) = v.iter().fold(([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]), |(lo, hi), p| {
            ([lo[0].min(p[0]), lo[1].min(p[1])], [hi[0].max(p[0]), hi[1].max(p[1])])
        });
        (v.len() == 4).then(|| vec![0.5 * (hi[0] - lo[0]), 0.5 * (hi[1] - lo[1])])
    });
    match half {
        Some(h) if f.dim() == n && h.iter().all(|v| (v - 0.5).abs() < 1e-12) => Ok(()),
        _ => Err(Error::InvalidParams("rectangle and box families use f = |.|_1 / 2".into())),
    }
}

fn recenter(e: &Shape) -> Result<Shape> {
    let b = shapes::barycenter(e);
    e.translate(&[-b[0], -b[1]])
}

/// Minimizer and diagnostics for one family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub family: ShapeFamily,
    pub parameters: Vec<f64>,
    pub shape: Shape,
    pub energy: EnergyBreakdown,
    /// Euler-Lagrange residual `max - min` of `H + eps v` where defined.
    pub el_residual: Option<f64>,
    /// `|u*|_inf` for star families.
    pub star_sup: Option<f64>,
    /// Best energy after each iteration of the winning run.
    pub trace: Vec<f64>,
    pub converged: bool,
    pub evaluations: usize,
    /// Index of the winning start (0 is the given start).
    pub restart: usize,
    /// Minimum on the end of the search range.
    pub at_boundary: bool,
    /// Wall time in seconds; not serialized, so reports stay reproducible.
    #[serde(skip)]
    pub wall_time: f64,
}

/// Golden-section search over the rectangle family.
pub fn minimize_1d(problem: &Problem) -> Result<OptimizationReport> {
    let ShapeFamily::Rectangle { lo, hi } = problem.family else {
        return Err(Error::InvalidParams("minimize_1d needs the rectangle family".into()));
    };
    let start = Instant::now();
    let alpha = problem.params.alpha;
    let eps = problem.params.epsilon();
    let spec = &problem.spec;
    let g = golden_section(|a| energy::rectangle_energy(a, alpha, eps, spec), lo, hi, PRESCAN, BRACKET_TOL)?;
    let x = vec![g.x];
    let energy = problem.evaluate(&x)?;
    Ok(OptimizationReport {
        family: problem.family.clone(),
        shape: problem.realize(&x)?,
        parameters: x,
        energy,
        el_residual: None,
        star_sup: None,
        trace: g.trace.iter().map(|t| t.1).collect(),
        converged: g.width <= BRACKET_TOL && !g.at_boundary,
        evaluations: g.evaluations,
        restart: 0,
        at_boundary: g.at_boundary,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

fn restart_points(problem: &Problem, start: &[f64]) -> Vec<Vec<f64>> {
    let mut pts = vec![start.to_vec()];
    for r in 0..RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(RESTART_SEED);
        rng.set_stream(r as u64 + 1);
        let p: Vec<f64> = match &problem.family {
            ShapeFamily::Rectangle { lo, hi } | ShapeFamily::BoxNd { lo, hi, .. } => {
                // Log-uniform in a narrowed range keeps restarts near plausible optima.
                let (a, b) = (lo.max(0.5).ln(), hi.min(2.0).ln());
                (0..problem.dim()).map(|_| rng.gen_range(a..b).exp()).collect()
            }
            ShapeFamily::PolygonFixedNormals => {
                start.iter().map(|h| h * rng.gen_range(0.8..1.25)).collect()
            }
            ShapeFamily::StarFourier { bound, .. } => {
                (0..problem.dim()).map(|_| rng.gen_range(-0.25..0.25) * bound).collect()
            }
        };
        pts.push(p);
    }
    pts
}

fn simplex_options(problem: &Problem) -> SimplexOptions {
    match &problem.family {
        ShapeFamily::StarFourier { bound, .. } => SimplexOptions { step: 0.25 * bound, ftol: 1e-14, xtol: 1e-7, max_evals: 3000 },
        ShapeFamily::PolygonFixedNormals => SimplexOptions { step: 0.05, ftol: 1e-14, xtol: 1e-8, max_evals: 6000 },
        _ => SimplexOptions { step: 0.05, ftol: 1e-14, xtol: 1e-8, max_evals: 4000 },
    }
}

/// Simplex descent with restarts; `start` defaults to the Wulff parameters.
pub fn minimize_nd(problem: &Problem, start: Option<&[f64]>) -> Result<OptimizationReport> {
    if matches!(problem.family, ShapeFamily::Rectangle { .. }) && start.is_none() {
        return minimize_1d(problem);
    }
    let clock = Instant::now();
    let x0 = start.map(|s| s.to_vec()).unwrap_or_else(|| problem.wulff_parameters());
    if x0.len() != problem.dim() {
        return Err(Error::InvalidParams(format!("start has {} parameters, family has {}", x0.len(), problem.dim())));
    }
    let opts = simplex_options(problem);
    let runs: Vec<SimplexResult> = restart_points(problem, &x0)
        .par_iter()
        .map(|p| nelder_mead(|x| problem.objective(x), p, opts))
        .collect();
    // Index-ordered reduction: lowest energy, then smallest parameter norm.
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate().skip(1) {
        let b = &runs[best];
        if r.value < b.value || (r.value == b.value && norm(&r.x) < norm(&b.x)) {
            best = i;
        }
    }
    let win = &runs[best];
    if !win.value.is_finite() {
        return Err(Error::InvalidParams("no restart reached a valid shape".into()));
    }
    let x = problem.normalize(&win.x)?;
    let energy = problem.evaluate(&x)?;
    let shape = problem.realize(&x)?;
    let el_residual = match (&problem.family, problem.tension.is_smooth(), problem.term) {
        (ShapeFamily::StarFourier { .. }, true, NonlocalTerm::Riesz | NonlocalTerm::None) => {
            energy::el_residual(&shape, &problem.tension, &problem.params, &problem.spec).ok().map(|r| r.residual)
        }
        _ => None,
    };
    Ok(OptimizationReport {
        family: problem.family.clone(),
        star_sup: problem.star_sup(&x),
        parameters: x,
        shape,
        energy,
        el_residual,
        trace: win.trace.clone(),
        converged: win.converged,
        evaluations: runs.iter().map(|r| r.evaluations).sum(),
        restart: best,
        at_boundary: false,
        wall_time: clock.elapsed().as_secs_f64(),
    })
}

/// Minimizes at the problem's own parameters: golden section for rectangles,
/// simplex otherwise.
pub fn minimize(problem: &Problem) -> Result<OptimizationReport> {
    match problem.family {
        ShapeFamily::Rectangle { .. } => minimize_1d(problem),
        _ => minimize_nd(problem, None),
    }
}

/// What a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    Epsilon,
    Mass,
}

/// One sweep point: its value and the report or the error it raised.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanPoint {
    pub value: f64,
    pub report: Option<OptimizationReport>,
    pub error: Option<String>,
}

fn with_sweep(params: &EnergyParams, var: SweepVariable, v: f64) -> Result<EnergyParams> {
    let out = match var {
        SweepVariable::Epsilon => EnergyParams { epsilon: Some(v), mass: None, ..params.clone() },
        SweepVariable::Mass => EnergyParams { epsilon: None, mass: Some(v), ..params.clone() },
    };
    out.validate()?;
    Ok(out)
}

/// One report per sweep value, each warm-started from the previous minimizer.
/// Failed points are recorded and the sweep continues.
pub fn scan(problem: &Problem, var: SweepVariable, sweep: &[f64]) -> Result<Vec<ScanPoint>> {
    if sweep.is_empty() {
        return Err(Error::InvalidParams("empty sweep".into()));
    }
    let mut out = Vec::with_capacity(sweep.len());
    let mut warm: Option<Vec<f64>> = None;
    for &v in sweep {
        let step = with_sweep(&problem.params, var, v).map(|params| Problem { params, ..problem.clone() }).and_then(|p| {
            match p.family {
                ShapeFamily::Rectangle { .. } => minimize_1d(&p),
                _ => minimize_nd(&p, warm.as_deref()),
            }
        });
        match step {
            Ok(r) => {
                warm = Some(r.parameters.clone());
                out.push(ScanPoint { value: v, report: Some(r), error: None });
            }
            Err(e) => out.push(ScanPoint { value: v, report: None, error: Some(e.to_string()) }),
        }
    }
    Ok(out)
}

/// Same as [`scan`] with sweep points solved independently in parallel from
/// the Wulff start.
pub fn scan_cold(problem: &Problem, var: SweepVariable, sweep: &[f64]) -> Result<Vec<ScanPoint>> {
    if sweep.is_empty() {
        return Err(Error::InvalidParams("empty sweep".into()));
    }
    Ok(sweep
        .par_iter()
        .map(|&v| match with_sweep(&problem.params, var, v).and_then(|params| minimize(&Problem { params, ..problem.clone() })) {
            Ok(r) => ScanPoint { value: v, report: Some(r), error: None },
            Err(e) => ScanPoint { value: v, report: None, error: Some(e.to_string()) },
        })
        .collect())
}

/// Perimeter of the regular `m`-gon inscribed in `B_rho` relative to the disk's.
pub fn polygon_perimeter_error(f: &SurfaceTension, rho: f64, m: usize) -> Result<f64> {
    let disk = Shape::disk([0.0, 0.0], rho)?;
    let gon = Shape::Polygon(Polygon::regular([0.0, 0.0], rho, m)?);
    let p = shapes::aniso_perimeter(&disk, f)?;
    Ok((shapes::aniso_perimeter(&gon, f)? - p).abs() / p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l1() -> SurfaceTension {
        SurfaceTension::scaled_l1(2, 0.5).unwrap()
    }

    fn riesz(eps: f64) -> EnergyParams {
        EnergyParams::with_epsilon(2, 1.0, eps).unwrap()
    }

    #[test]
    fn rectangle_without_nonlocal_term() {
        let p = Problem::new(
            ShapeFamily::Rectangle { lo: 0.5, hi: 2.0 },
            l1(),
            NonlocalTerm::Riesz,
            riesz(0.0),
            QuadratureSpec::default(),
        )
        .unwrap();
        let r = minimize_1d(&p).unwrap();
        assert!((r.parameters[0] - 1.0).abs() < 1e-6);
        assert!((r.energy.total - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_normals_recover_square() {
        let p = Problem::new(
            ShapeFamily::PolygonFixedNormals,
            l1(),
            NonlocalTerm::None,
            riesz(0.0),
            QuadratureSpec::default(),
        )
        .unwrap();
        let r = minimize_nd(&p, Some(&[0.7, 0.4, 0.5, 0.6])).unwrap();
        let sq = Shape::polygon(vec![[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]).unwrap();
        let d = shapes::hausdorff_boundary_distance(&r.shape, &sq).unwrap();
        assert!(d < 1e-3, "{d} {:?}", r.parameters);
        assert!((shapes::volume(&r.shape) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn report_round_trips() {
        let p = Problem::new(
            ShapeFamily::BoxNd { n: 3, lo: 0.5, hi: 2.0 },
            SurfaceTension::scaled_l1(3, 0.5).unwrap(),
            NonlocalTerm::None,
            EnergyParams::with_epsilon(3, 1.0, 0.0).unwrap(),
            QuadratureSpec::default(),
        )
        .unwrap();
        let r = minimize_nd(&p, Some(&[1.2, 0.9])).unwrap();
        let again = p.evaluate(&r.parameters).unwrap();
        assert!((again.total - r.energy.total).abs() <= 1e-10);
        assert!(r.parameters.iter().all(|s| (s - 1.0).abs() < 1e-4), "{:?}", r.parameters);
    }

    #[test]
    fn rejects_wrong_tension() {
        let e = Problem::new(
            ShapeFamily::Rectangle { lo: 0.5, hi: 2.0 },
            SurfaceTension::euclidean(2).unwrap(),
            NonlocalTerm::Riesz,
            riesz(0.1),
            QuadratureSpec::default(),
        );
        assert!(e.is_err());
    }
}

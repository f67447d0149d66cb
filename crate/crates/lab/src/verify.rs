//! Invariant suites run by `anisodrop verify`.

use crate::cases;
use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::output::{Cell, Table};
use anisodrop::anisotropy::{build_wulff, SurfaceTension};
use anisodrop::energy;
use anisodrop::nonlocal::{self, DualKind, QuadratureSpec};
use anisodrop::shapes::{self, Shape, StarDomain};
use anisodrop::special;
use rayon::prelude::*;
use serde::Serialize;

pub const SUITES: &[&str] = &["ball", "wulff", "scaling", "bounded", "slicing", "lipschitz", "dual", "curvature"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub suite: String,
    pub case: String,
    pub quantity: String,
    pub value: f64,
    pub bound: f64,
    /// Distance to failure; non-negative exactly when the check passes.
    pub margin: f64,
    pub pass: bool,
}

fn upper(suite: &str, case: String, quantity: &str, value: f64, bound: f64) -> CheckRow {
    let margin = bound - value;
    CheckRow { suite: suite.into(), case, quantity: quantity.into(), value, bound, margin, pass: margin >= 0.0 }
}

fn lower(suite: &str, case: String, quantity: &str, value: f64, bound: f64) -> CheckRow {
    let margin = value - bound;
    CheckRow { suite: suite.into(), case, quantity: quantity.into(), value, bound, margin, pass: margin > 0.0 }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Suite options shared by every suite.
#[derive(Debug, Clone)]
pub struct SuiteContext {
    pub seed: u64,
    pub cases: Option<usize>,
    pub spec: QuadratureSpec,
}

impl SuiteContext {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self { seed: cfg.seed(), cases: cfg.cases, spec: cfg.quadrature.clone() }
    }

    fn count(&self, default: usize) -> usize {
        self.cases.unwrap_or(default)
    }
}

fn alpha_cycle(i: usize) -> f64 {
    [0.5, 1.0, 1.5][i % 3]
}

pub fn ball_suite(cx: &SuiteContext) -> LabResult<Vec<CheckRow>> {
    let cases = [(2usize, 0.5, 1.0), (2, 1.0, 2.0), (2, 1.5, 0.5), (3, 1.0, 1.0), (3, 2.5, 0.8)];
    let mut out = Vec::new();
    for (n, alpha, r) in cases {
        let ball = Shape::Ball(shapes::Ball::new(vec![0.0; n], r)?);
        let v = nonlocal::riesz_potential(&ball, &vec![0.0; n], alpha, &cx.spec)?.value;
        let exact = special::ball_center_potential(n, alpha, r);
        out.push(upper("ball", format!("n={n} alpha={alpha} r={r}"), "rel_error", rel(v, exact), 1e-3));
    }
    Ok(out)
}

fn wulff_tensions() -> LabResult<Vec<(&'static str, SurfaceTension)>> {
    Ok(vec![
        ("euclidean", SurfaceTension::euclidean(2)?),
        ("quadratic(1,2)", SurfaceTension::diagonal(&[1.0, 2.0])?),
        ("half_l1", SurfaceTension::scaled_l1(2, 0.5)?),
        ("perturbed(0.1,k=3)", SurfaceTension::perturbed(0.1, vec![(3, 1.0)])?),
    ])
}

pub fn wulff_suite(cx: &SuiteContext) -> LabResult<Vec<CheckRow>> {
    let tensions = wulff_tensions()?;
    let mut out = Vec::new();
    for (name, f) in &tensions {
        let k = if let Some(v) = f.wulff_polygon() {
            Shape::polygon(v.to_vec())?
        } else {
            Shape::Star(StarDomain::wulff(build_wulff(f, 512)?)?)
        };
        let p = shapes::aniso_perimeter(&k, f)?;
        let b = energy::wulff_lower_bound(&k, f);
        out.push(lower("wulff", format!("{name} K"), "P_f - bound", p - b, -1e-9 * b));
        for i in 0..cx.count(10) {
            let mut r = cases::rng(cx.seed, 1, i as u64);
            let e = Shape::Polygon(cases::star_polygon(&mut r));
            let p = shapes::aniso_perimeter(&e, f)?;
            let b = energy::wulff_lower_bound(&e, f);
            out.push(lower("wulff", format!("{name} polygon {i}"), "P_f - bound", p - b, 0.0));
        }
    }
    Ok(out)
}

pub fn scaling_suite(cx: &SuiteContext) -> LabResult<Vec<CheckRow>> {
    let f = SurfaceTension::diagonal(&[1.0, 2.0])?;
    let n = cx.count(50);
    let rows: Vec<LabResult<Vec<CheckRow>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = cases::rng(cx.seed, 2, i as u64);
            let e = Shape::Polygon(cases::star_polygon(&mut rng));
            let alpha = alpha_cycle(i);
            let v = nonlocal::interaction_energy(&e, alpha, &cx.spec)?.value;
            let p = shapes::aniso_perimeter(&e, &f)?;
            let mut out = Vec::new();
            for r in [0.5, 2.0] {
                let re = e.dilate(r);
                let vr = nonlocal::interaction_energy(&re, alpha, &cx.spec)?.value;
                let pr = shapes::aniso_perimeter(&re, &f)?;
                let case = format!("polygon {i} alpha={alpha} r={r}");
                out.push(upper("scaling", case.clone(), "V rel_error", (vr - r.powf(4.0 - alpha) * v).abs() / vr, 1e-4));
                out.push(upper("scaling", case, "P_f rel_error", rel(pr, r * p), 1e-12));
            }
            Ok(out)
        })
        .collect();
    Ok(rows.into_iter().collect::<LabResult<Vec<_>>>()?.into_iter().flatten().collect())
}

pub fn bounded_suite(cx: &SuiteContext) -> LabResult<Vec<CheckRow>> {
    let n = cx.count(10);
    let mut out = Vec::new();
    for i in 0..n {
        let mut rng = cases::rng(cx.seed, 3, i as u64);
        let e = Shape::Polygon(cases::star_polygon(&mut rng));
        let alpha = alpha_cycle(i);
        let vol = shapes::volume(&e);
        let mut pts: Vec<Vec<f64>> = nonlocal::residual_points(&e, 64)?.iter().map(|p| p.x.to_vec()).collect();
        pts.push(shapes::barycenter(&e));
        let vmax = pts
            .par_iter()
            .map(|x| nonlocal::riesz_potential(&e, x, alpha, &cx.spec).map(|v| v.value))
            .collect::<anisodrop::Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let r = (vol / special::omega(2)).sqrt();
        out.push(upper("bounded", format!("polygon {i} alpha={alpha}"), "max v_E", vmax, special::ball_center_potential(2, alpha, r)));
    }
    Ok(out)
}

pub fn slicing_suite(cx: &SuiteContext) -> LabResult<Vec<CheckRow>> {
    let tensions = wulff_tensions()?;
    let mut out = Vec::new();
    for i in 0..cx.count(20) {
        let mut rng = cases::rng(cx.seed, 4, i as u64);
        let e = Shape::Polygon(cases::star_polygon(&mut rng));
        let plane = cases::plane_through(&mut rng, &e);
        let f = &tensions[i % tensions.len()].1;
        let s = shapes::slice(&e, &plane)?;
        let pe = shapes::aniso_perimeter(&e, f)?;
        let side = |x: &Shape| if x.is_empty() { Ok(0.0) } else { shapes::aniso_perimeter(x, f) };
        let nu = plane.normal();
        let lhs = side(&s.plus)? + side(&s.minus)?;
        let rhs = pe + (f.eval2(nu) + f.eval2([-nu[0], -nu[1]])) * s.cut_measure;
        out.push(upper("slicing", format!("polygon {i} {}", tensions[i % tensions.len()].0), "abs_error", (lhs - rhs).abs(), 1e-12 * rhs.max(1.0)));
        let vol = shapes::volume(&s.plus) + shapes::volume(&s.minus);
        out.push(upper("slicing", format!("polygon {i}"), "volume abs_error", (vol - shapes::volume(&e)).abs(), 1e-12));
    }
    Ok(out)
}

pub fn lipschitz_suite(cx: &SuiteContext) -> LabResult<Vec<CheckRow>> {
    let n = cx.count(20);
    let rows: Vec<LabResult<CheckRow>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = cases::rng(cx.seed, 5, i as u64);
            let f = Shape::Polygon(cases::star_polygon(&mut rng));
            let b = shapes::barycenter(&f);
            let e = Shape::Polygon(cases::convex_polygon(&mut rng, [b[0], b[1]]));
            let alpha = alpha_cycle(i);
            let r = nonlocal::lipschitz_gap_bound(&e, &f, alpha, &cx.spec)?;
            let mut row = upper("lipschitz", format!("pair {i} alpha={alpha}"), "|V(E)-V(F)|", r.gap, r.bound);
            row.pass = r.holds;
            Ok(row)
        })
        .collect();
    rows.into_iter().collect()
}

/// Tension and exponents used by the dual-potential checks.
pub fn dual_setup() -> LabResult<(SurfaceTension, [DualKind; 3])> {
    Ok((
        SurfaceTension::diagonal(&[1.0, 1.5])?,
        [DualKind::U1 { alpha: 0.5 }, DualKind::U2 { beta: 1.0 }, DualKind::U3],
    ))
}

pub fn dual_maximality(
    f: &SurfaceTension,
    kinds: &[DualKind],
    count: usize,
    seed: u64,
    spec: &QuadratureSpec,
) -> LabResult<Vec<CheckRow>> {
    let k = build_wulff(f, 128)?;
    let ks = Shape::Star(StarDomain::wulff(k.clone())?);
    let comps = cases::competitors(seed, 6, &k, count);
    let mut out = Vec::new();
    for kind in kinds {
        let uk = nonlocal::dual_potential(&ks, f, *kind, spec)?.value;
        let vals: Vec<LabResult<f64>> =
            comps.par_iter().map(|e| Ok(nonlocal::dual_potential(e, f, *kind, spec)?.value)).collect();
        for (j, v) in vals.into_iter().enumerate() {
            let v = v?;
            out.push(lower("dual", format!("U{} competitor {j} ({})", kind.index(), comps[j].name()), "U(K) - U(E)", uk - v, 0.0));
        }
    }
    Ok(out)
}

pub fn dual_suite(cx: &SuiteContext) -> LabResult<Vec<CheckRow>> {
    let (f, kinds) = dual_setup()?;
    dual_maximality(&f, &kinds, cx.count(20), cx.seed, &cx.spec)
}

pub fn curvature_suite(_cx: &SuiteContext) -> LabResult<Vec<CheckRow>> {
    let tensions = [
        ("euclidean", SurfaceTension::euclidean(2)?),
        ("quadratic(1,2)", SurfaceTension::diagonal(&[1.0, 2.0])?),
        ("perturbed(0.1,k=3)", SurfaceTension::perturbed(0.1, vec![(3, 1.0)])?),
    ];
    let mut out = Vec::new();
    for (name, f) in &tensions {
        let k = build_wulff(f, 512)?;
        for r in [0.5, 1.0, 1.7] {
            let e = Shape::Star(StarDomain::wulff(k.clone())?.with_transform(r, [0.3, -0.2]));
            let h = energy::aniso_curvature(&e, f)?;
            let worst = h.iter().map(|v| (v * r - 1.0).abs()).fold(0.0, f64::max);
            out.push(upper("curvature", format!("{name} r={r}"), "max |H r - 1|", worst, 1e-2));
        }
    }
    Ok(out)
}

pub fn run_suite(name: &str, cx: &SuiteContext) -> LabResult<Vec<CheckRow>> {
    match name {
        "ball" => ball_suite(cx),
        "wulff" => wulff_suite(cx),
        "scaling" => scaling_suite(cx),
        "bounded" => bounded_suite(cx),
        "slicing" => slicing_suite(cx),
        "lipschitz" => lipschitz_suite(cx),
        "dual" => dual_suite(cx),
        "curvature" => curvature_suite(cx),
        _ => Err(LabError::Config(format!("unknown suite {name:?}; known: {}", SUITES.join(", ")))),
    }
}

pub fn table(rows: &[CheckRow]) -> Table {
    let mut t = Table::new(&["suite", "case", "quantity", "value", "bound", "margin", "pass"]);
    for r in rows {
        t.push(vec![
            Cell::from(r.suite.as_str()),
            Cell::from(r.case.as_str()),
            Cell::from(r.quantity.as_str()),
            r.value.into(),
            r.bound.into(),
            r.margin.into(),
            r.pass.into(),
        ]);
    }
    t
}

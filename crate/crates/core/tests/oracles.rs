//! Cross-checks of the quadrature paths against independent oracles.

use anisodrop::anisotropy::{build_wulff, SurfaceTension};
use anisodrop::energy::{self, NonlocalTerm};
use anisodrop::nonlocal::{self, oracle, DualKind, EnergyParams, Kernel, QuadratureSpec};
use anisodrop::shapes::{self, GridMask, Shape, StarDomain};
use std::f64::consts::PI;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn ellipse(a: f64, b: f64, m: usize) -> Shape {
    let k = build_wulff(&SurfaceTension::diagonal(&[a, b]).unwrap(), m).unwrap();
    Shape::Star(StarDomain::wulff(k).unwrap())
}

#[test]
fn square_interaction_matches_monte_carlo() {
    let sq = Shape::unit_square();
    let inside = |p: [f64; 2]| p[0].abs() < 0.5 && p[1].abs() < 0.5;
    for alpha in [0.5, 1.0, 1.5] {
        let q = nonlocal::interaction_energy(&sq, alpha, &spec()).unwrap().value;
        let mc = oracle::interaction_mc(inside, &Kernel::Riesz { alpha }, [-0.5, -0.5], [0.5, 0.5], 400_000, 11);
        assert!((q - mc.value).abs() < 5.0 * mc.std_error + 1e-3 * q, "alpha {alpha}: {q} vs {mc:?}");
    }
}

#[test]
fn ellipse_potential_matches_monte_carlo() {
    let e = ellipse(1.0, 2.0, 256);
    let inside = |p: [f64; 2]| p[0] * p[0] + p[1] * p[1] / 4.0 < 1.0;
    for (x, alpha) in [([0.0, 2.0], 1.0), ([1.0, 0.0], 0.5), ([0.3, -0.7], 1.5)] {
        let q = nonlocal::riesz_potential(&e, &x, alpha, &spec()).unwrap().value;
        let mc = oracle::potential_mc(inside, &Kernel::Riesz { alpha }, x, 4.5, 400_000, 5);
        assert!((q - mc.value).abs() < 5.0 * mc.std_error + 1e-3 * q, "{x:?}: {q} vs {mc:?}");
    }
}

#[test]
fn grid_and_polygon_agree() {
    // An L-shaped union of unit cells, rasterized exactly on its own grid.
    let rows = vec!["110".to_string(), "111".to_string()];
    let g = Shape::from_spec(shapes::ShapeSpec::Grid { h: 1.0, origin: [0.0, 0.0], rows }).unwrap();
    let p = Shape::polygon(vec![[0.0, 0.0], [3.0, 0.0], [3.0, 1.0], [2.0, 1.0], [2.0, 2.0], [0.0, 2.0]]).unwrap();
    assert!(matches!(g, Shape::Grid(GridMask { .. })));
    for alpha in [0.5, 1.0] {
        let vg = nonlocal::interaction_energy(&g, alpha, &spec()).unwrap().value;
        let vp = nonlocal::interaction_energy(&p, alpha, &spec()).unwrap().value;
        assert!((vg - vp).abs() < 1e-7 * vp, "{vg} vs {vp}");
    }
}

#[test]
fn planar_box_equals_rectangle() {
    for (a, alpha) in [(1.0, 1.0), (1.7, 0.5), (0.6, 1.5)] {
        let b = Shape::from_spec(shapes::ShapeSpec::Box { sides: vec![a, 1.0 / a] }).unwrap();
        let vb = nonlocal::interaction_energy(&b, alpha, &spec()).unwrap().value;
        let vr = energy::rectangle_interaction(a, alpha, &spec()).unwrap();
        assert!((vb - vr).abs() < 1e-8 * vr, "{vb} vs {vr}");
    }
}

#[test]
fn euclidean_curvature_of_ellipse() {
    // Curvature at the axis points of x^2/a^2 + y^2/b^2 = 1 is a/b^2 and b/a^2.
    let (a, b) = (1.0, 2.0);
    let e = ellipse(a, b, 512);
    let h = energy::aniso_curvature(&e, &SurfaceTension::euclidean(2).unwrap()).unwrap();
    let pts = e.boundary_points(512).unwrap();
    let at = |target: [f64; 2]| {
        let i = (0..pts.len())
            .min_by(|&i, &j| {
                let d = |k: usize| (pts[k].x[0] - target[0]).hypot(pts[k].x[1] - target[1]);
                d(i).total_cmp(&d(j))
            })
            .unwrap();
        h[i]
    };
    assert!((at([a, 0.0]) - a / (b * b)).abs() < 1e-3, "{}", at([a, 0.0]));
    assert!((at([0.0, b]) - b / (a * a)).abs() < 1e-3, "{}", at([0.0, b]));
}

#[test]
fn quadratic_wulff_shape_is_the_ellipse() {
    let k = build_wulff(&SurfaceTension::diagonal(&[1.0, 2.0]).unwrap(), 256).unwrap();
    for s in k.samples() {
        let v = s.x[0] * s.x[0] + s.x[1] * s.x[1] / 4.0;
        assert!((v - 1.0).abs() < 1e-12);
    }
    assert!((k.volume() - 2.0 * PI).abs() < 1e-3);
}

#[test]
fn euclidean_anisotropic_interaction_is_riesz() {
    let e = Shape::polygon(vec![[0.0, 0.0], [1.5, 0.2], [1.0, 1.1], [0.1, 0.8]]).unwrap();
    let f = SurfaceTension::euclidean(2).unwrap();
    let v = nonlocal::interaction_energy(&e, 1.0, &spec()).unwrap().value;
    let vf = nonlocal::interaction_energy_aniso(&e, &f, 1.0, &spec()).unwrap().value;
    assert!((v - vf).abs() < 1e-10 * v);
}

#[test]
fn dual_potentials_of_wulff_shape() {
    let f = SurfaceTension::diagonal(&[1.0, 1.5]).unwrap();
    let k = build_wulff(&f, 128).unwrap();
    let e = Shape::Star(StarDomain::wulff(k.clone()).unwrap());
    for kind in [DualKind::U1 { alpha: 0.5 }, DualKind::U2 { beta: 1.0 }, DualKind::U3] {
        let r = nonlocal::dual_potential(&e, &f, kind, &spec()).unwrap();
        let exact = kind.wulff_value(2, k.volume());
        assert!((r.value - exact).abs() < 1e-8 * exact.abs().max(1.0), "{kind:?}: {} vs {exact}", r.value);
        assert!(r.y_star[0].hypot(r.y_star[1]) < 1e-6);
    }
}

#[test]
fn mass_form_matches_dilated_energy() {
    let f = SurfaceTension::scaled_l1(2, 0.5).unwrap();
    let e = Shape::polygon(vec![[-0.6, -0.4], [0.6, -0.5], [0.5, 0.45], [-0.5, 0.4]]).unwrap();
    let e = shapes::rescale_to_volume(&e, 1.0).unwrap();
    for (alpha, m) in [(1.0, 0.3), (0.5, 2.0), (1.5, 0.05)] {
        let params = EnergyParams::with_mass(2, alpha, m).unwrap();
        let b = energy::total_energy(&e, &f, NonlocalTerm::Riesz, &params, &spec()).unwrap();
        let dilated = shapes::rescale_to_volume(&e, m).unwrap();
        let direct = energy::mass_form_energy(&dilated, &f, alpha, &spec()).unwrap();
        assert!((b.mass_form_total - direct).abs() < 1e-10 * direct, "{} vs {direct}", b.mass_form_total);
    }
}

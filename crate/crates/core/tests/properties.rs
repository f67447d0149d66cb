use anisodrop::anisotropy::{build_wulff, SurfaceTension};
use anisodrop::energy;
use anisodrop::nonlocal::{self, DualKind, QuadratureSpec};
use anisodrop::shapes::{self, Polygon, Shape, StarDomain};
use proptest::prelude::*;
use std::f64::consts::PI;

fn spec() -> QuadratureSpec {
    QuadratureSpec { rel_tol: 1e-9, ..Default::default() }
}

/// Star-shaped polygons about the origin.
fn star_polygon() -> impl Strategy<Value = Shape> {
    (5usize..10).prop_flat_map(|m| {
        (prop::collection::vec(0.5f64..1.2, m), prop::collection::vec(0.15f64..0.85, m)).prop_map(move |(r, t)| {
            let v = (0..m)
                .map(|j| {
                    let a = 2.0 * PI * (j as f64 + t[j]) / m as f64;
                    [r[j] * a.cos(), r[j] * a.sin()]
                })
                .collect();
            Shape::Polygon(Polygon::new(v).unwrap())
        })
    })
}

fn tension() -> impl Strategy<Value = SurfaceTension> {
    prop_oneof![
        Just(SurfaceTension::euclidean(2).unwrap()),
        (0.5f64..2.0, 0.5f64..2.0).prop_map(|(a, b)| SurfaceTension::diagonal(&[a, b]).unwrap()),
        (0.2f64..1.0).prop_map(|s| SurfaceTension::scaled_l1(2, s).unwrap()),
        (0.0f64..0.05, 2u32..5).prop_map(|(d, k)| SurfaceTension::perturbed(d, vec![(k, 1.0)]).unwrap()),
    ]
}

fn unit(t: f64) -> [f64; 2] {
    [t.cos(), t.sin()]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn tension_is_homogeneous_and_subadditive(f in tension(), t1 in 0.0..2.0 * PI, t2 in 0.0..2.0 * PI, s in 0.1f64..5.0) {
        let (a, b) = (unit(t1), unit(t2));
        let fa = f.eval2(a);
        prop_assert!((f.eval2([s * a[0], s * a[1]]) - s * fa).abs() <= 1e-12 * s * fa);
        prop_assert!(f.eval2([a[0] + b[0], a[1] + b[1]]) <= fa + f.eval2(b) + 1e-12);
    }

    #[test]
    fn dual_pairing_inequality(f in tension(), t1 in 0.0..2.0 * PI, t2 in 0.0..2.0 * PI, r in 0.1f64..3.0) {
        let nu = unit(t1);
        let x = [r * t2.cos(), r * t2.sin()];
        prop_assert!(x[0] * nu[0] + x[1] * nu[1] <= f.eval2(nu) * f.dual2(x) * (1.0 + 1e-10));
    }

    #[test]
    fn translation_invariance(e in star_polygon(), z in prop::array::uniform2(-3.0f64..3.0), alpha in 0.3f64..1.7, f in tension()) {
        let moved = e.translate(&z).unwrap();
        let (v, vm) = (
            nonlocal::interaction_energy(&e, alpha, &spec()).unwrap().value,
            nonlocal::interaction_energy(&moved, alpha, &spec()).unwrap().value,
        );
        prop_assert!((v - vm).abs() <= 1e-8 * v);
        let (p, pm) = (shapes::aniso_perimeter(&e, &f).unwrap(), shapes::aniso_perimeter(&moved, &f).unwrap());
        prop_assert!((p - pm).abs() <= 1e-12 * p);
    }

    #[test]
    fn dilation_scaling(e in star_polygon(), r in 0.3f64..3.0, alpha in 0.3f64..1.7, f in tension()) {
        let d = e.dilate(r);
        let v = nonlocal::interaction_energy(&e, alpha, &spec()).unwrap().value;
        let vd = nonlocal::interaction_energy(&d, alpha, &spec()).unwrap().value;
        prop_assert!((vd - r.powf(4.0 - alpha) * v).abs() <= 1e-6 * vd);
        let p = shapes::aniso_perimeter(&e, &f).unwrap();
        prop_assert!((shapes::aniso_perimeter(&d, &f).unwrap() - r * p).abs() <= 1e-12 * r * p);
        prop_assert!((shapes::volume(&d) - r * r * shapes::volume(&e)).abs() <= 1e-12 * shapes::volume(&d));
    }

    #[test]
    fn wulff_inequality(e in star_polygon(), f in tension()) {
        let p = shapes::aniso_perimeter(&e, &f).unwrap();
        prop_assert!(p >= energy::wulff_lower_bound(&e, &f) * (1.0 - 1e-9));
    }

    #[test]
    fn potential_below_ball_bound(e in star_polygon(), alpha in 0.3f64..1.7, t in 0.0..2.0 * PI, s in 0.0f64..1.0) {
        let x = [0.4 * s * t.cos(), 0.4 * s * t.sin()];
        let v = nonlocal::riesz_potential(&e, &x, alpha, &spec()).unwrap().value;
        prop_assert!(nonlocal::within_ball_bound(v, 2, alpha, shapes::volume(&e)));
    }

    #[test]
    fn energies_are_deterministic(e in star_polygon(), alpha in 0.3f64..1.7) {
        let a = nonlocal::interaction_energy(&e, alpha, &spec()).unwrap();
        let b = nonlocal::interaction_energy(&e, alpha, &spec()).unwrap();
        prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
        prop_assert_eq!(a.error.to_bits(), b.error.to_bits());
    }

    #[test]
    fn slicing_identity(e in star_polygon(), t in 0.0..2.0 * PI, c in -0.5f64..0.5, f in tension()) {
        let plane = shapes::SlicingPlane::new(unit(t), c).unwrap();
        let s = shapes::slice(&e, &plane).unwrap();
        let p = |x: &Shape| if x.is_empty() { 0.0 } else { shapes::aniso_perimeter(x, &f).unwrap() };
        let lhs = p(&s.plus) + p(&s.minus);
        let rhs = p(&e) + (f.eval2(unit(t)) + f.eval2([-unit(t)[0], -unit(t)[1]])) * s.cut_measure;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        prop_assert!((shapes::volume(&s.plus) + shapes::volume(&s.minus) - shapes::volume(&e)).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn box_family_in_the_plane_is_the_rectangle(a in 0.5f64..2.0, alpha in 0.3f64..1.7, eps in 0.0f64..0.5) {
        let r = energy::rectangle_energy(a, alpha, eps, &spec()).unwrap();
        let b = energy::box_energy(&[a], alpha, eps, &spec()).unwrap();
        prop_assert!((r - b).abs() <= 1e-8 * r);
    }

    #[test]
    fn wulff_shape_maximizes_dual_potentials(
        coeffs in prop::collection::vec(-0.03f64..0.03, 6),
        i in 0usize..3,
    ) {
        let f = SurfaceTension::diagonal(&[1.0, 1.5]).unwrap();
        let k = build_wulff(&f, 128).unwrap();
        let u: Vec<f64> = k.angles().unwrap().iter().map(|&t| {
            (0..3).map(|j| {
                let m = (j + 2) as f64;
                coeffs[2 * j] * (m * t).cos() + coeffs[2 * j + 1] * (m * t).sin()
            }).sum::<f64>()
        }).collect();
        prop_assume!(u.iter().any(|v| v.abs() > 1e-3));
        let kind = [DualKind::U1 { alpha: 0.5 }, DualKind::U2 { beta: 1.0 }, DualKind::U3][i];
        let e = shapes::rescale_to_volume(&Shape::Star(StarDomain::new(k.clone(), u).unwrap()), k.volume()).unwrap();
        let uk = kind.wulff_value(2, k.volume());
        let ue = nonlocal::dual_potential(&e, &f, kind, &spec()).unwrap().value;
        prop_assert!(uk > ue, "{:?}: U(K) = {} <= U(E) = {}", kind, uk, ue);
    }
}

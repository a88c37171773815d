use std::f64::consts::PI;

use proptest::prelude::*;
use xigeo_core::curves::PlaneCurve;
use xigeo_core::drift::{divergence, drift_laplacian, gaussian_weight, ibp_residual, weighted_integral};
use xigeo_core::geometry::GeometryBundle;
use xigeo_core::grid::{Field, GridSpec};
use xigeo_core::surfaces::{make_product_curves, make_product_torus};
use xigeo_core::{Bundle64, GeoError};

fn torus(a: f64, b: f64, n: usize) -> Bundle64 {
    GeometryBundle::new(&make_product_torus(a, b, GridSpec::torus(n, n).unwrap()).unwrap()).unwrap()
}

#[test]
fn laplacian_on_round_torus() {
    let (a, b) = (0.9, 1.6);
    let m = torus(a, b, 32);
    let spec = *m.spec();
    let f = Field::scalar_from_fn(spec, |u, v| (2.0 * u).cos() * v.sin());
    let c = drift_laplacian(&m, &f).unwrap();
    for i in 0..spec.len() {
        let (p, q) = spec.coords(i);
        let (u, v) = (spec.u(p), spec.v(q));
        let lap = -(4.0 / (a * a) + 1.0 / (b * b)) * (2.0 * u).cos() * v.sin();
        assert!((c.laplacian.get(i, 0) - lap).abs() < 1e-10);
        // x^⊤ = 0 on the round torus, so the drift term vanishes.
        assert!((c.drift.get(i, 0) - lap).abs() < 1e-10);
        let grad_u = -2.0 * (2.0 * u).sin() * v.sin() / (a * a);
        assert!((c.gradient.get(i, 0) - grad_u).abs() < 1e-10);
    }
}

#[test]
fn drift_on_ellipse_product_matches_arc_length_formula() {
    let n = 64;
    let c1 = PlaneCurve::ellipse(1.0, 1.4, n).unwrap();
    let c2 = PlaneCurve::ellipse(0.8, 0.6, n).unwrap();
    let m = GeometryBundle::new(&make_product_curves(&c1, &c2).unwrap()).unwrap();
    let spec = *m.spec();
    let (k1, k2) = (2.0 * PI / c1.length(), 2.0 * PI / c2.length());
    let f = Field::scalar_from_fn(spec, |s, t| (k1 * s).cos() + (2.0 * k2 * t).sin());
    let c = drift_laplacian(&m, &f).unwrap();
    let mut worst = 0.0f64;
    for i in 0..spec.len() {
        let (p, q) = spec.coords(i);
        let (s, t) = (spec.u(p), spec.v(q));
        let (g1, t1) = (c1.gamma()[p], c1.tangent()[p]);
        let (g2, t2) = (c2.gamma()[q], c2.tangent()[q]);
        let fs = -k1 * (k1 * s).sin();
        let ft = 2.0 * k2 * (2.0 * k2 * t).cos();
        let lap = -k1 * k1 * (k1 * s).cos() - 4.0 * k2 * k2 * (2.0 * k2 * t).sin();
        let drift = lap - (g1[0] * t1[0] + g1[1] * t1[1]) * fs - (g2[0] * t2[0] + g2[1] * t2[1]) * ft;
        worst = worst.max((c.drift.get(i, 0) - drift).abs());
    }
    assert!(worst < 1e-8, "{worst:e}");
}

#[test]
fn gaussian_integral_of_one() {
    let (a, b) = (0.7, 1.3);
    let m = torus(a, b, 32);
    let one = Field::constant(*m.spec(), 1.0);
    let expected = 4.0 * PI * PI * a * b * (-(a * a + b * b) / 2.0).exp();
    assert!((weighted_integral(&m, &one).unwrap() - expected).abs() < 1e-12);
    let w = gaussian_weight(&m);
    assert!((w.max_value() - (-(a * a + b * b) / 2.0f64).exp()).abs() < 1e-14);
}

#[test]
fn divergence_of_coordinate_fields() {
    let (a, b) = (1.2, 0.5);
    let m = torus(a, b, 32);
    let spec = *m.spec();
    let v = Field::from_fn(spec, 2, |u, v, out| {
        out[0] = u.sin();
        out[1] = (3.0 * v).cos();
    });
    let d = divergence(&m, &v).unwrap();
    for i in 0..spec.len() {
        let (p, q) = spec.coords(i);
        let expected = spec.u(p).cos() - 3.0 * (3.0 * spec.v(q)).sin();
        assert!((d.get(i, 0) - expected).abs() < 1e-10);
    }
}

#[test]
fn divergence_theorem_on_ellipse_product() {
    let s = make_product_curves(
        &PlaneCurve::ellipse(1.0, 1.2, 48).unwrap(),
        &PlaneCurve::ellipse(0.9, 0.7, 48).unwrap(),
    )
    .unwrap();
    let m = GeometryBundle::new(&s).unwrap();
    let spec = *m.spec();
    let (su, sv) = (2.0 * PI / spec.period_u, 2.0 * PI / spec.period_v);
    let v = Field::from_fn(spec, 2, |u, v, out| {
        out[0] = (su * u).sin() + (sv * v).cos();
        out[1] = (su * u + sv * v).cos();
    });
    let total: f64 = divergence(&m, &v).unwrap().integrate(&m.metric.area).unwrap();
    assert!(total.abs() < 1e-10, "{total:e}");
}

#[test]
fn inputs_are_validated() {
    let m = torus(1.0, 1.0, 16);
    let spec = *m.spec();
    let vector = Field::zeros(spec, 2);
    assert!(matches!(drift_laplacian(&m, &vector), Err(GeoError::Parameter(_))));
    assert!(matches!(divergence(&m, &Field::zeros(spec, 1)), Err(GeoError::Parameter(_))));
    let other = Field::zeros(GridSpec::torus(8, 8).unwrap(), 1);
    assert!(weighted_integral(&m, &other).is_err());
    let mut raw = vec![0.0; spec.len()];
    raw[17] = f64::NAN;
    assert!(Field::new(spec, 1, raw).is_err());
    let bad = Field::scalar_from_points(spec, |i| if i == 17 { f64::NAN } else { 0.0 });
    assert!(matches!(drift_laplacian(&m, &bad), Err(GeoError::NonFinite { .. })));
    assert!(ibp_residual(&m, &bad, &Field::zeros(spec, 1)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn integration_by_parts_for_random_trig_pairs(
        cu in prop::array::uniform4(-1.0f64..1.0),
        cv in prop::array::uniform4(-1.0f64..1.0),
        ku in 1u32..4, kv in 1u32..4,
    ) {
        let s = make_product_curves(
            &PlaneCurve::ellipse(1.0, 1.3, 32).unwrap(),
            &PlaneCurve::circle(0.8, 32).unwrap(),
        ).unwrap();
        let m = GeometryBundle::new(&s).unwrap();
        let spec = *m.spec();
        let (su, sv) = (2.0 * PI / spec.period_u, 2.0 * PI / spec.period_v);
        let (ku, kv) = (f64::from(ku), f64::from(kv));
        let poly = |c: [f64; 4]| Field::scalar_from_fn(spec, |u, v| {
            let (x, y) = (su * u, sv * v);
            c[0] + c[1] * (ku * x).cos() + c[2] * (kv * y).sin() + c[3] * (x - kv * y).cos()
        });
        prop_assert!(ibp_residual(&m, &poly(cu), &poly(cv)).unwrap() < 1e-9);
    }

    #[test]
    fn drift_of_constants_vanishes(c in -5.0f64..5.0) {
        let m = torus(1.0, 2.0, 16);
        let f = Field::constant(*m.spec(), c);
        prop_assert!(drift_laplacian(&m, &f).unwrap().drift.max_abs() < 1e-12);
    }
}

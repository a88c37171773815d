use std::f64::consts::{FRAC_1_SQRT_2, PI};

use proptest::prelude::*;
use xigeo_core::curves::{product_xi, shoot_closed, PlaneCurve, Rotation, ShootOptions};
use xigeo_core::geometry::GeometryBundle;
use xigeo_core::grid::{Axis, GridSpec};
use xigeo_core::surfaces::{make_product_curves, make_product_torus, make_twisted_torus, Unitary};
use xigeo_core::xi::{
    fit_product_torus, pinching_report, split_position, verify_identity, xi_estimate, xi_report, IdentityBattery,
    IdentityId, IdentityOutcome,
};
use xigeo_core::{Bundle64, GeoError, Tolerances};

fn torus(a: f64, b: f64, n: usize) -> Bundle64 {
    GeometryBundle::new(&make_product_torus(a, b, GridSpec::torus(n, n).unwrap()).unwrap()).unwrap()
}

fn dot(a: [f64; 4], b: [f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sup deviation of a pointwise quantity from a constant.
fn dev(n: usize, target: f64, f: impl Fn(usize) -> f64) -> f64 {
    (0..n).map(|i| (f(i) - target).abs()).fold(0.0, f64::max)
}

#[test]
fn torus_one_two_invariants() {
    let m = torus(1.0, 2.0, 64);
    let e = xi_estimate(&m, &Tolerances::default()).unwrap();
    assert!(e.is_xi);
    let n = m.spec().len();
    let diff = |i: usize| {
        let (h, x) = (m.mean.vec4(i), e.xi_hat.vec4(i));
        [h[0] - x[0], h[1] - x[1], h[2] - x[2], h[3] - x[3]]
    };
    assert!(dev(n, 1.25, |i| m.h_sq.get(i, 0)) < 1e-10);
    assert!(dev(n, 5.0, |i| dot(diff(i), diff(i))) < 1e-10);
    assert!(dev(n, 2.25, |i| dot(e.xi_hat.vec4(i), e.xi_hat.vec4(i))) < 1e-10);
    assert!(dev(n, -0.75, |i| dot(m.mean.vec4(i), e.xi_hat.vec4(i))) < 1e-10);

    let p = pinching_report(&m, &e);
    assert!(p.p_min.abs() < 1e-10 && p.p_max.abs() < 1e-10);
    for c in p.conditions {
        assert!(!c.holds && !c.marginal);
        assert!((c.margin + 0.75).abs() < 1e-10);
    }
    assert!(p.h_xi_const_residual < 1e-10);
    assert!(!p.advisory);
}

#[test]
fn balanced_torus_meets_every_condition() {
    let m = torus(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 32);
    let e = xi_estimate(&m, &Tolerances::default()).unwrap();
    let p = pinching_report(&m, &e);
    for c in p.conditions {
        assert!(c.holds && !c.marginal);
        assert!((c.margin - 2.0).abs() < 1e-9);
    }
}

#[test]
fn clifford_torus_is_a_self_shrinker() {
    let m = torus(1.0, 1.0, 32);
    let e = xi_estimate(&m, &Tolerances::default()).unwrap();
    assert!(e.is_xi);
    assert!(e.xi_hat.sup_norm() < 1e-10);
    let c = e.coefficients.unwrap();
    assert!(c[0].abs() < 1e-10 && c[1].abs() < 1e-10);
    let p = pinching_report(&m, &e);
    assert!(p.conditions.iter().all(|c| c.holds && c.marginal));
}

#[test]
fn coefficients_and_fit_recover_radii() {
    for (a, b) in [(0.6, 1.3), (2.1, 0.9), (1.5, 1.5)] {
        let m = torus(a, b, 32);
        let e = xi_estimate(&m, &Tolerances::default()).unwrap();
        let c = e.coefficients.unwrap();
        assert!((c[0] - (1.0 / a - a)).abs() < 1e-9, "{c:?}");
        assert!((c[1] - (1.0 / b - b)).abs() < 1e-9, "{c:?}");
        let fit = fit_product_torus(&m, &e).unwrap();
        assert!(fit.matched && fit.distance < 1e-8);
        // Equal radii are a double root of the fitting quadratic, good to √ε only.
        let tol = if a == b { 1e-6 } else { 1e-8 };
        assert!((fit.a - a).abs() < tol && (fit.b - b).abs() < tol, "{fit:?}");
    }
}

#[test]
fn non_circular_product_breaks_the_pinching() {
    let shot = shoot_closed(0.0f64, Rotation::new(2, 3).unwrap(), (0.2, 0.9), ShootOptions::default()).unwrap();
    let curve = shot.curve.unwrap();
    let cs = product_xi(&curve, 0.0, &PlaneCurve::circle(1.0, 32).unwrap(), 0.0).unwrap();
    let m = GeometryBundle::new(&cs.surface).unwrap();
    let e = xi_estimate(&m, &Tolerances::default()).unwrap();
    assert!(e.is_xi);
    if let Some(fit) = fit_product_torus(&m, &e) {
        assert!(!fit.matched);
    }
    // With λ = 0 and the unit circle, |h|² + |x^⊥|² − |ξ|² − 4 = 2k² − 2.
    let p = pinching_report(&m, &e);
    let spec = *m.spec();
    for i in 0..spec.len() {
        let k = curve.curvature()[spec.coords(i).0];
        assert!((p.p.get(i, 0) - (2.0 * k * k - 2.0)).abs() < 1e-6);
    }
    assert!(p.p_max > 1.0 && p.p_min < -1.0);
}

#[test]
fn ellipse_product_is_not_xi() {
    let s = make_product_curves(
        &PlaneCurve::ellipse(1.0, 1.2, 64).unwrap(),
        &PlaneCurve::circle(1.0, 64).unwrap(),
    )
    .unwrap();
    let m = GeometryBundle::new(&s).unwrap();
    let tol = Tolerances::default();
    let e = xi_estimate(&m, &tol).unwrap();
    assert!(!e.is_xi && e.parallel_residual > 1e-2);
    assert!(e.coefficients.is_none());
    let p = pinching_report(&m, &e);
    assert!(p.advisory);

    let battery = IdentityBattery::new(&m, &e, tol);
    for id in IdentityId::ALL {
        if id.xi_only() {
            assert!(battery.precondition(id).is_some());
            assert!(matches!(battery.verify(id), Err(GeoError::Precondition(_))));
        } else {
            assert!(battery.verify(id).unwrap() < 1e-6, "{id}");
        }
    }
}

#[test]
fn position_split_on_translated_torus() {
    let c = [0.3, -0.2, 0.1, 0.4];
    let s = make_product_torus(1.0, 1.5, GridSpec::torus(32, 32).unwrap()).unwrap().translate(c);
    let m = GeometryBundle::new(&s).unwrap();
    let split = split_position(&m);
    assert!(split.defect < 1e-12);
    // Independent tangent frame from spectral derivatives of the samples.
    let spec = *s.spec();
    let xu = s.x().differentiate(Axis::U, 1).unwrap();
    let xv = s.x().differentiate(Axis::V, 1).unwrap();
    for i in 0..spec.len() {
        let n = split.x_perp.vec4(i);
        assert!(dot(n, xu.vec4(i)).abs() < 1e-10);
        assert!(dot(n, xv.vec4(i)).abs() < 1e-10);
        // On the round torus x^⊤ is the tangential part of the translation.
        let t = split.x_top.vec4(i);
        let (u, v) = (xu.vec4(i), xv.vec4(i));
        let expected: Vec<f64> = (0..4)
            .map(|k| dot(c, u) * u[k] / dot(u, u) + dot(c, v) * v[k] / dot(v, v))
            .collect();
        for k in 0..4 {
            assert!((t[k] - expected[k]).abs() < 1e-10);
        }
        assert!((split.x_top_sq.get(i, 0) - dot(t, t)).abs() < 1e-12);
    }
    let e = xi_estimate(&m, &Tolerances::default()).unwrap();
    assert!(!e.is_xi);
}

#[test]
fn non_lagrangian_input_is_refused() {
    let m = GeometryBundle::new(&make_twisted_torus(GridSpec::<f64>::torus(16, 16).unwrap()).unwrap()).unwrap();
    let tol = Tolerances::default();
    assert!(matches!(xi_estimate(&m, &tol), Err(GeoError::NotLagrangian { .. })));
    assert!(xi_report(&m, &tol).is_err());
}

#[test]
fn report_on_product_torus() {
    let m = torus(0.8, 1.4, 32);
    let tol = Tolerances::default();
    let r = xi_report(&m, &tol).unwrap();
    assert_eq!(r.identities.len(), IdentityId::ALL.len());
    for (id, outcome) in &r.identities {
        match outcome {
            IdentityOutcome::Residual(v) => assert!(*v < 1e-6, "{id} {v:e}"),
            IdentityOutcome::Skipped(why) => panic!("{id} skipped: {why}"),
        }
    }
    assert_eq!(r.windings, [1, 1]);
    assert!((r.periods[0] - 1.0).abs() < 1e-9 && (r.periods[1] - 1.0).abs() < 1e-9);
    assert_eq!(r.global.genus, 1);
    assert!(r.global.maslov_nontrivial);
    assert!((r.global.area - 4.0 * PI * PI * 0.8 * 1.4).abs() < 1e-9);
    assert!(r.fit.unwrap().matched);
}

#[test]
fn identity_names_round_trip() {
    for id in IdentityId::ALL {
        assert_eq!(id.as_str().parse::<IdentityId>().unwrap(), id);
        assert_eq!(id.to_string(), id.as_str());
    }
    assert_eq!(IdentityId::ALL.iter().filter(|id| id.xi_only()).count(), 9);
    assert!("eq9.9".parse::<IdentityId>().is_err());
}

#[test]
fn verify_identity_matches_battery() {
    let m = torus(1.0, 2.0, 32);
    let tol = Tolerances::default();
    let e = xi_estimate(&m, &tol).unwrap();
    let battery = IdentityBattery::new(&m, &e, tol);
    for id in IdentityId::ALL {
        assert_eq!(verify_identity(id, &m, &e, &tol).unwrap(), battery.verify(id).unwrap());
    }
}

#[test]
fn xi_in_single_precision() {
    let spec = GridSpec::<f32>::torus(16, 16).unwrap();
    let m = GeometryBundle::new(&make_product_torus(1.0f32, 2.0, spec).unwrap()).unwrap();
    let tol = Tolerances {
        lagrangian: 1e-4,
        xi: 1e-3,
        identity: 1e-3,
    };
    let e = xi_estimate(&m, &tol).unwrap();
    assert!(e.is_xi);
    let p = pinching_report(&m, &e);
    assert!(p.p_min.abs() < 1e-3 && p.p_max.abs() < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pinching_vanishes_on_product_tori(a in 0.3f64..3.0, b in 0.3f64..3.0) {
        let m = torus(a, b, 16);
        let e = xi_estimate(&m, &Tolerances::default()).unwrap();
        prop_assert!(e.is_xi);
        let p = pinching_report(&m, &e);
        prop_assert!(p.p_min.abs() < 1e-9 && p.p_max.abs() < 1e-9);
        // ⟨H, ξ⟩ = 1/a² + 1/b² − 2 everywhere.
        let expected = 1.0 / (a * a) + 1.0 / (b * b) - 2.0;
        prop_assert!((p.h_xi_min - expected).abs() < 1e-9 && (p.h_xi_max - expected).abs() < 1e-9);
    }

    #[test]
    fn xi_classification_is_unitary_invariant(
        phi in -PI..PI, theta in -PI..PI, alpha in -PI..PI, beta in -PI..PI,
        a in 0.5f64..2.0, b in 0.5f64..2.0,
    ) {
        let s = make_product_torus(a, b, GridSpec::torus(16, 16).unwrap()).unwrap()
            .transform(&Unitary::from_angles(phi, theta, alpha, beta));
        let m = GeometryBundle::new(&s).unwrap();
        let e = xi_estimate(&m, &Tolerances::default()).unwrap();
        prop_assert!(e.is_xi);
        let xi_sq = (1.0 / a - a).powi(2) + (1.0 / b - b).powi(2);
        let n = m.spec().len();
        prop_assert!(dev(n, xi_sq, |i| dot(e.xi_hat.vec4(i), e.xi_hat.vec4(i))) < 1e-9);
    }

    #[test]
    fn pinching_is_reparametrization_invariant(dp in 0usize..16, dq in 0usize..16) {
        let s = make_product_curves(
            &PlaneCurve::ellipse(1.0f64, 1.3, 16).unwrap(),
            &PlaneCurve::circle(0.9, 16).unwrap(),
        ).unwrap();
        let tol = Tolerances::default();
        let m0 = GeometryBundle::new(&s).unwrap();
        let m1 = GeometryBundle::new(&s.shift_origin(dp, dq)).unwrap();
        let (e0, e1) = (xi_estimate(&m0, &tol).unwrap(), xi_estimate(&m1, &tol).unwrap());
        let (p0, p1) = (pinching_report(&m0, &e0), pinching_report(&m1, &e1));
        prop_assert!((p0.p_max - p1.p_max).abs() < 1e-9);
        prop_assert!((p0.p_min - p1.p_min).abs() < 1e-9);
        prop_assert!((e0.parallel_residual - e1.parallel_residual).abs() < 1e-6);
    }
}


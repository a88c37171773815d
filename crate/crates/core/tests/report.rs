use xigeo_core::curves::PlaneCurve;
use xigeo_core::grid::GridSpec;
use xigeo_core::report::{
    analyze, linspace, plot_data, scan, scan_cell, scan_csv, Metadata, ReportBody, ReportFile, SurfaceFile,
    SCAN_HEADER,
};
use xigeo_core::surfaces::{make_equivariant, make_product_curves, make_product_torus, make_twisted_torus};
use xigeo_core::{GeoError, Tolerances};

fn spec(n: usize) -> GridSpec<f64> {
    GridSpec::torus(n, n).unwrap()
}

#[test]
fn surface_file_round_trip_is_exact() {
    let c = PlaneCurve::ellipse_at([0.5, 0.0], 1.0, 1.3, 24).unwrap();
    let m = make_equivariant(&c, 16).unwrap();
    let file = SurfaceFile::from_surface(&m);
    let back = SurfaceFile::from_json(&file.to_json()).unwrap();
    assert_eq!(back, file);
    let m2 = back.to_surface().unwrap();
    assert_eq!(m2.x().values(), m.x().values());
    assert_eq!(m2.spec(), m.spec());
    assert_eq!(m2.provenance(), m.provenance());
    let tol = Tolerances::default();
    assert_eq!(analyze(&m, &tol).unwrap().to_json(), analyze(&m2, &tol).unwrap().to_json());
}

#[test]
fn malformed_surface_files_are_rejected() {
    let mut file = SurfaceFile::from_surface(&make_product_torus(1.0, 1.0, spec(8)).unwrap());
    file.x.pop();
    assert!(matches!(file.to_surface(), Err(GeoError::Malformed(_))));
    assert!(matches!(SurfaceFile::from_json("{\"nu\": 4}"), Err(GeoError::Malformed(_))));
    let no_provenance = r#"{"nu":4,"nv":4,"period_u":6.283185307179586,"period_v":6.283185307179586,"x":[]}"#;
    let f = SurfaceFile::from_json(no_provenance).unwrap();
    assert!(f.provenance.is_none());
    assert!(f.to_surface().is_err());
}

#[test]
fn product_torus_report_contents() {
    let body = analyze(&make_product_torus(1.0, 2.0, spec(32)).unwrap(), &Tolerances::default()).unwrap();
    assert!(body.lagrangian_residual < 1e-12);
    assert!((body.invariants.h_sq.min - 1.25).abs() < 1e-10);
    assert!((body.invariants.h_sq.max - 1.25).abs() < 1e-10);
    let h_xi = body.invariants.h_xi.value.as_ref().unwrap();
    assert!((h_xi.min + 0.75).abs() < 1e-10);
    let xi = body.xi.value.as_ref().unwrap();
    assert!(xi.is_xi);
    let c = xi.coefficients.value.unwrap();
    assert!(c[0].abs() < 1e-10 && (c[1] + 1.5).abs() < 1e-10);
    assert!(xi.fitted.value.as_ref().unwrap().matched);
    let pinching = body.pinching.value.as_ref().unwrap();
    assert_eq!(pinching.conditions.keys().collect::<Vec<_>>(), ["c1", "c2", "c3", "c4"]);
    assert!(pinching.conditions.values().all(|c| !c.holds));
    let maslov = body.maslov.value.as_ref().unwrap();
    assert_eq!(maslov.rounded, [1, 1]);
    assert!(maslov.nontrivial);
    assert_eq!(body.global.value.as_ref().unwrap().genus, 1);
    assert_eq!(body.identities.len(), 16);
    assert!(body.failures(1e-6).is_empty());
}

#[test]
fn non_xi_report_skips_xi_identities() {
    let s = make_product_curves(
        &PlaneCurve::ellipse(1.0, 1.2, 32).unwrap(),
        &PlaneCurve::circle(1.0, 32).unwrap(),
    )
    .unwrap();
    let body = analyze(&s, &Tolerances::default()).unwrap();
    let xi = body.xi.value.as_ref().unwrap();
    assert!(!xi.is_xi);
    assert!(xi.coefficients.value.is_none() && xi.coefficients.reason.is_some());
    assert!(body.pinching.value.as_ref().unwrap().advisory);
    for id in ["eq2.17", "lem3.2", "lem3.5b"] {
        let r = &body.identities[id];
        assert!(r.value.is_none() && r.reason.is_some(), "{id}");
    }
    assert!(body.identities["gauss"].value.is_some());
    assert!(body.failures(1e-6).is_empty());
    // Failures are reported against the given tolerance only.
    assert!(!body.failures(0.0).is_empty());
}

#[test]
fn non_lagrangian_report_has_null_sections() {
    let body = analyze(&make_twisted_torus(spec(16)).unwrap(), &Tolerances::default()).unwrap();
    assert!((body.lagrangian_residual - 1.0).abs() < 1e-9);
    assert!(body.xi.value.is_none() && body.xi.reason.as_deref().unwrap().contains("not Lagrangian"));
    assert!(body.pinching.value.is_none() && body.maslov.value.is_none() && body.global.value.is_none());
    assert!(body.identities.values().all(|m| m.value.is_none()));
    let json: serde_json::Value = serde_json::from_str(&body.to_json()).unwrap();
    assert!(json["xi"]["value"].is_null());
}

#[test]
fn report_file_round_trip_and_key_order() {
    let body = analyze(&make_product_torus(0.9, 1.1, spec(16)).unwrap(), &Tolerances::default()).unwrap();
    let file = ReportFile {
        metadata: Metadata {
            tool: "xigeo".into(),
            version: "0.0.0".into(),
            command: vec!["analyze".into()],
        },
        report: body.clone(),
    };
    let text = file.to_json();
    let back = ReportFile::from_json(&text).unwrap();
    assert_eq!(back.report, body);
    assert_eq!(back.to_json(), text);
    let keys = ["input", "lagrangian_residual", "invariants", "xi", "pinching", "identities", "maslov", "global"];
    let body_text = body.to_json();
    let positions: Vec<usize> = keys
        .iter()
        .map(|k| body_text.find(&format!("\n  \"{k}\"")).unwrap())
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn report_body_is_deterministic() {
    let m = make_product_curves(
        &PlaneCurve::ellipse(0.9, 1.2, 24).unwrap(),
        &PlaneCurve::ellipse(1.1, 0.8, 24).unwrap(),
    )
    .unwrap();
    let tol = Tolerances::default();
    let first = analyze(&m, &tol).unwrap().to_json();
    for _ in 0..3 {
        assert_eq!(analyze(&m, &tol).unwrap().to_json(), first);
    }
    let parsed: ReportBody = serde_json::from_str(&first).unwrap();
    assert_eq!(parsed.to_json(), first);
}

#[test]
fn scan_cells_and_csv() {
    let tol = Tolerances::default();
    let row = scan_cell(1.0, 2.0, spec(16), &tol).unwrap();
    assert!((row.h2 - 1.25).abs() < 1e-10 && (row.mean2 - 1.25).abs() < 1e-10);
    assert!((row.h_xi + 0.75).abs() < 1e-10);
    assert!(row.p_max < 1e-10);
    assert!(!row.region && row.conditions.iter().all(|c| !c.holds));

    let grid = linspace(0.5, 1.5, 3);
    assert_eq!(grid, vec![0.5, 1.0, 1.5]);
    let rows = scan(&grid, &grid, spec(16), &tol).unwrap();
    assert_eq!(rows.len(), 9);
    assert_eq!((rows[1].a, rows[1].b), (0.5, 1.0));
    let csv = scan_csv(&rows);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], SCAN_HEADER);
    assert_eq!(lines.len(), 10);
    assert!(!csv.contains('\r'));
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), SCAN_HEADER.split(',').count());
    }
    // Clifford cell: every margin is zero, so all four are marginal.
    let clifford = lines.iter().find(|l| l.starts_with("1.0000000000000000e0,1.0000000000000000e0")).unwrap();
    assert!(clifford.ends_with("c1;c2;c3;c4"), "{clifford}");
    let a: f64 = lines[1].split(',').next().unwrap().parse().unwrap();
    assert_eq!(a, 0.5);
}

#[test]
fn plot_data_columns() {
    let csv = plot_data(&make_product_torus(1.0, 1.0, spec(8)).unwrap(), &Tolerances::default()).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "u,v,h_sq,mean_sq,gauss_curvature,position_sq,pinching");
    assert_eq!(lines.count(), 64);
    let twisted = plot_data(&make_twisted_torus(spec(8)).unwrap(), &Tolerances::default()).unwrap();
    assert!(!twisted.lines().next().unwrap().contains("pinching"));
}

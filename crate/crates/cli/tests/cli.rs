use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn xigeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xigeo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&o.stdout))
    })
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

/// The comparable part of a report file: everything after the metadata.
fn body_text(text: &str) -> &str {
    &text[text.find("\"report\"").expect("report key")..]
}

#[test]
fn analyze_clifford_torus() {
    let o = xigeo(&["analyze", "--family", "product-torus", "--a", "1", "--b", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["metadata"]["tool"], "xigeo");
    let r = &v["report"];
    assert_eq!(r["input"]["nu"], 64);
    assert_eq!(r["xi"]["value"]["is_xi"], true);
    let p = &r["pinching"]["value"];
    assert!(p["p_max"].as_f64().unwrap().abs() <= 1e-8);
    assert!(p["p_min"].as_f64().unwrap().abs() <= 1e-8);
    assert_eq!(p["conditions"]["c4"]["holds"], true);
    assert_eq!(p["conditions"]["c4"]["marginal"], true);
    assert_eq!(r["maslov"]["value"]["rounded"], serde_json::json!([1, 1]));
    assert_eq!(r["identities"].as_object().unwrap().len(), 16);
}

#[test]
fn analyze_ellipse_product_restricts_identities() {
    let o = xigeo(&[
        "analyze", "--family", "product-ellipse", "--a1", "1", "--b1", "1.2", "--a2", "1", "--b2", "1", "--nu",
        "32", "--nv", "32",
    ]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["report"];
    assert_eq!(r["xi"]["value"]["is_xi"], false);
    for (id, entry) in r["identities"].as_object().unwrap() {
        let xi_only = id.starts_with("eq2.17") || id.starts_with("eq2.18") || id.starts_with("eq3") || id.starts_with("lem");
        assert_eq!(entry["value"].is_null(), xi_only, "{id}");
        assert_eq!(entry["reason"].is_null(), !xi_only, "{id}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let args = |out: &Path| {
        vec![
            "analyze".to_string(),
            "--family".into(),
            "equivariant".into(),
            "--a".into(),
            "1".into(),
            "--b".into(),
            "1.3".into(),
            "--center".into(),
            "0.5".into(),
            "--nu".into(),
            "32".into(),
            "--nv".into(),
            "32".into(),
            "-o".into(),
            out.display().to_string(),
        ]
    };
    for out in [&a, &b] {
        let argv = args(out);
        let o = xigeo(&argv.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(code(&o), 0);
    }
    let (ta, tb) = (std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
    assert_eq!(body_text(&ta), body_text(&tb));
    assert_ne!(ta, tb, "metadata records the differing output path");
}

#[test]
fn dumped_surface_reproduces_report() {
    let dir = tempfile::tempdir().unwrap();
    let surface = dir.path().join("surface.json");
    let (direct, loaded) = (dir.path().join("direct.json"), dir.path().join("loaded.json"));
    let s = surface.to_str().unwrap();
    let o = xigeo(&[
        "analyze", "--family", "product-torus", "--a", "1", "--b", "2", "--nu", "32", "--nv", "32", "--dump-surface",
        s, "-o", direct.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let file = read_json(&surface);
    assert_eq!(file["x"].as_array().unwrap().len(), 4 * 32 * 32);
    let o = xigeo(&["analyze", "--input", s, "-o", loaded.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let (a, b) = (std::fs::read_to_string(&direct).unwrap(), std::fs::read_to_string(&loaded).unwrap());
    assert_eq!(body_text(&a), body_text(&b));
}

#[test]
fn plot_data_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("plot.csv");
    let o = xigeo(&[
        "analyze", "--family", "product-torus", "--a", "1", "--b", "1", "--nu", "16", "--nv", "16",
        "--emit-plot-data", plot.to_str().unwrap(), "-o", dir.path().join("r.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(plot).unwrap();
    assert_eq!(csv.lines().count(), 1 + 16 * 16);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("x.json");
    std::fs::write(&f, "{}").unwrap();
    for args in [
        vec!["analyze"],
        vec!["analyze", "--family", "product-torus", "--a", "1"],
        vec!["analyze", "--family", "product-torus", "--a", "1", "--b", "1", "--input", f.to_str().unwrap()],
        vec!["analyze", "--family", "product-torus", "--a", "1", "--b", "1", "--nu", "4"],
        vec!["analyze", "--family", "product-torus", "--a", "-1", "--b", "1"],
        vec!["scan", "--a-range", "1:2:0"],
        vec!["scan", "--a-range", "nonsense"],
        vec!["scan", "--family", "equivariant"],
        vec!["curve", "--lambda", "0", "--bracket", "2:1"],
        vec!["curve", "--lambda", "0", "--bracket", "0.5:1.5", "--rotation", "2/4"],
        vec!["frobnicate"],
    ] {
        let o = xigeo(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn malformed_input_is_a_numeric_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    std::fs::write(&f, r#"{"nu":8,"nv":8,"period_u":1.0,"period_v":1.0,"x":[1.0]}"#).unwrap();
    let o = xigeo(&["analyze", "--input", f.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let o = xigeo(&["analyze", "--input", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}

#[test]
fn non_lagrangian_analysis_still_reports() {
    let o = xigeo(&["analyze", "--family", "twisted", "--nu", "16", "--nv", "16"]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["report"];
    assert!(r["xi"]["value"].is_null());
    assert!(r["xi"]["reason"].as_str().unwrap().contains("not Lagrangian"));
}

#[test]
fn verify_exit_codes() {
    let o = xigeo(&["verify", "--family", "product-torus", "--a", "1", "--b", "2", "--nu", "32", "--nv", "32"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 16);
    assert!(text.lines().all(|l| l.ends_with("pass")), "{text}");

    let o = xigeo(&[
        "verify", "--family", "product-ellipse", "--a1", "1", "--b1", "1.2", "--a2", "1", "--b2", "1", "--nu", "32",
        "--nv", "32",
    ]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().contains("skipped"));

    let o = xigeo(&[
        "verify", "--family", "product-torus", "--a", "1", "--b", "2", "--nu", "32", "--nv", "32", "--tol-identity",
        "1e-30",
    ]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8(o.stdout).unwrap().contains("FAIL"));

    let o = xigeo(&["verify", "--family", "twisted", "--nu", "16", "--nv", "16"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn scan_rows_follow_the_sign_rule() {
    let o = xigeo(&["scan", "--a-range", "0.5:1.5:3", "--b-range", "0.5:2:4", "--nu", "16", "--nv", "16"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "a,b,h2,H2,Hxi,P_max,c1,c2,c3,c4,region,marginal");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 12);
    for r in &rows {
        let (a, b): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let h_xi: f64 = r[4].parse().unwrap();
        let p_max: f64 = r[5].parse().unwrap();
        assert!(p_max.abs() <= 1e-8);
        assert!((h_xi - (1.0 / (a * a) + 1.0 / (b * b) - 2.0)).abs() < 1e-10);
        if h_xi.abs() > 1e-6 {
            assert_eq!(r[9], r[10], "c4 against region at ({a}, {b})");
        }
    }
    let clifford = rows.iter().find(|r| r[0].parse::<f64>().unwrap() == 1.0 && r[1].parse::<f64>().unwrap() == 1.0).unwrap();
    assert!((clifford[2].parse::<f64>().unwrap() - 2.0).abs() < 1e-10);
    assert!((clifford[3].parse::<f64>().unwrap() - 2.0).abs() < 1e-10);
    assert_eq!(clifford[9], "true");
    assert!(clifford[11].contains("c4"));
}

#[test]
fn curve_finds_unit_circle() {
    let o = xigeo(&["curve", "--lambda", "0", "--rotation", "1/1", "--bracket", "0.5:1.5"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["status"], "found");
    assert!((v["r0"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!(v["closure_residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["curve"]["samples"].as_array().unwrap().len(), 128);
}

#[test]
fn curve_product_matches_torus_two_one() {
    let dir = tempfile::tempdir().unwrap();
    let surface = dir.path().join("product.json");
    let o = xigeo(&[
        "curve", "--lambda", "-1.5", "--rotation", "1/1", "--bracket", "1:3", "--product-with-circle", "1",
        "--samples", "64", "--surface-output", surface.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert!((v["r0"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    let product = &v["product"]["value"];
    assert_eq!(product["certification"]["passed"], true);
    let inv = &product["report"]["invariants"];
    for (key, expected) in [("h_sq", 1.25), ("mean_sq", 1.25), ("position_sq", 5.0)] {
        for end in ["min", "max"] {
            let got = inv[key][end].as_f64().unwrap();
            assert!((got - expected).abs() <= 1e-8, "{key}.{end} = {got}");
        }
    }
    assert!((inv["h_xi"]["value"]["min"].as_f64().unwrap() + 0.75).abs() <= 1e-8);
    assert!((inv["gauss_curvature"]["max"].as_f64().unwrap()).abs() <= 1e-8);

    // The written surface analyzes to the same report.
    let o = xigeo(&["analyze", "--input", surface.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["report"], product["report"]);
}

#[test]
fn curve_not_found_is_a_reported_outcome() {
    let o = xigeo(&[
        "curve", "--lambda", "0", "--bracket", "1.2:1.4", "--product-with-circle", "1",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["status"], "not-found");
    assert!(v["curve"].is_null() && v["r0"].is_null());
    assert!(v["product"]["value"].is_null());
    assert!(v["product"]["reason"].as_str().unwrap().contains("not-found"));
}

#[test]
fn curve_rotation_two_thirds_is_machine_readable() {
    let o = xigeo(&["curve", "--lambda", "0", "--rotation", "2/3", "--bracket", "0.2:0.9"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(["found", "not-found", "not-closed"].contains(&v["status"].as_str().unwrap()));
    assert_eq!(v["rotation"], "2/3");
}

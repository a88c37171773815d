use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde_json::{json, Value};
use xigeo_core::curves::{circle_lambda, product_xi, shoot_closed, PlaneCurve, Rotation, ShootOptions, ShootStatus};
use xigeo_core::grid::GridSpec;
use xigeo_core::report::{self, Metadata, ReportFile, SurfaceFile};
use xigeo_core::{GeoError, Tolerances};

use crate::{source, AnalyzeArgs, CliError, CurveArgs, Family, ScanArgs};

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn metadata() -> Metadata {
    Metadata {
        tool: "xigeo".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: std::env::args().skip(1).collect(),
    }
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("{what} must look like lo:hi, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Parses `start:stop:count` into its sample points.
pub fn parse_range(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("range must look like start:stop:count, got `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(bad());
    };
    let start: f64 = a.trim().parse().map_err(|_| bad())?;
    let stop: f64 = b.trim().parse().map_err(|_| bad())?;
    let count: usize = n.trim().parse().map_err(|_| bad())?;
    if count == 0 || !start.is_finite() || !stop.is_finite() || (count > 1 && start == stop) {
        return Err(CliError::Usage(format!("empty range `{s}`")));
    }
    Ok(report::linspace(start, stop, count))
}

pub fn analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let tol = args.tol.tolerances();
    let m = source::load(&args.source)?;
    if let Some(p) = &args.dump_surface {
        fs::write(p, SurfaceFile::from_surface(&m).to_json())?;
    }
    if let Some(p) = &args.emit_plot_data {
        fs::write(p, report::plot_data(&m, &tol)?)?;
    }
    let body = report::analyze(&m, &tol)?;
    let file = ReportFile {
        metadata: metadata(),
        report: body,
    };
    emit(args.output.as_deref(), &with_newline(file.to_json()))
}

pub fn verify(args: &AnalyzeArgs) -> Result<(), CliError> {
    let tol = args.tol.tolerances();
    let m = source::load(&args.source)?;
    let body = report::analyze(&m, &tol)?;
    if body.xi.value.is_none() {
        return Err(CliError::Numeric(
            GeoError::NotLagrangian {
                residual: body.lagrangian_residual,
                tolerance: tol.lagrangian,
            }
            .into(),
        ));
    }
    let mut out = String::new();
    for (id, r) in &body.identities {
        let line = match (r.value, &r.reason) {
            (Some(v), _) if v <= tol.identity => format!("{id:<8} {v:.3e} pass\n"),
            (Some(v), _) => format!("{id:<8} {v:.3e} FAIL\n"),
            (None, why) => format!("{id:<8} skipped: {}\n", why.as_deref().unwrap_or("")),
        };
        out.push_str(&line);
    }
    emit(args.output.as_deref(), &out)?;
    let failures = body.failures(tol.identity);
    if failures.is_empty() {
        Ok(())
    } else {
        let names: Vec<String> = failures.iter().map(|(k, v)| format!("{k}={v:.3e}")).collect();
        Err(CliError::Verification(names.join(", ")))
    }
}

pub fn scan(args: &ScanArgs) -> Result<(), CliError> {
    if args.family != Family::ProductTorus {
        return Err(CliError::Usage("scan supports only --family product-torus".into()));
    }
    let tol = args.tol.tolerances();
    let as_ = parse_range(&args.a_range)?;
    let bs = parse_range(&args.b_range)?;
    let spec = GridSpec::torus(args.nu, args.nv)?;
    let rows = report::scan(&as_, &bs, spec, &tol)?;
    emit(args.output.as_deref(), &report::scan_csv(&rows))
}

fn curve_json(c: &PlaneCurve<f64>, lambda: f64) -> Result<Value, GeoError> {
    Ok(json!({
        "length": c.length(),
        "closure_gap": c.closure_gap(),
        "lambda_residual": c.lambda_residual(lambda)?,
        "curvature_variation": c.curvature_variation(),
        "samples": c.gamma(),
    }))
}

pub fn curve(args: &CurveArgs) -> Result<(), CliError> {
    let tol: Tolerances = args.tol.tolerances();
    let rotation = Rotation::from_str(&args.rotation)?;
    let bracket = parse_pair(&args.bracket, "--bracket")?;
    let options = ShootOptions {
        samples: args.samples,
        ds: args.ds,
        ..ShootOptions::default()
    };
    let shot = shoot_closed(args.lambda, rotation, bracket, options)?;
    let curve = match &shot.curve {
        Some(c) => curve_json(c, args.lambda)?,
        None => Value::Null,
    };
    let mut out = json!({
        "status": shot.status.as_str(),
        "lambda": args.lambda,
        "rotation": rotation.to_string(),
        "bracket": [bracket.0, bracket.1],
        "r0": shot.r0,
        "closure_residual": shot.closure_residual,
        "curve": curve,
    });
    if let Some(radius) = args.product_with_circle {
        out["product"] = match (&shot.curve, shot.status) {
            (Some(c), ShootStatus::Found) => {
                let circle = PlaneCurve::circle(radius, args.circle_samples)?;
                let cs = product_xi(c, args.lambda, &circle, circle_lambda(radius)?)?;
                if let Some(p) = &args.surface_output {
                    fs::write(p, SurfaceFile::from_surface(&cs.surface).to_json())?;
                }
                let cert = cs.certify(&tol)?;
                let body = report::analyze(&cs.surface, &tol)?;
                json!({
                    "value": {
                        "lambdas": cs.lambdas,
                        "certification": {
                            "xi_deviation": cert.xi_deviation,
                            "parallel_residual": cert.parallel_residual,
                            "is_xi": cert.is_xi,
                            "passed": cert.passed,
                        },
                        "report": serde_json::to_value(&body).map_err(|e| CliError::Numeric(e.into()))?,
                    },
                    "reason": Value::Null,
                })
            }
            _ => json!({ "value": Value::Null, "reason": format!("curve status is {}", shot.status.as_str()) }),
        };
    }
    let text = serde_json::to_string_pretty(&out).map_err(|e| CliError::Numeric(e.into()))?;
    emit(args.output.as_deref(), &with_newline(text))
}

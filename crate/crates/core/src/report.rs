//! Serializable surfaces, analysis reports and scan tables.
//!
//! Reports split into a `metadata` block (tool version, command line) and a
//! `report` body. The body is a pure function of the surface and the
//! tolerances, written with a fixed key order, so two runs on the same input
//! produce byte-identical bodies.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::geometry::{metric_and_connection, second_fundamental, GeometryBundle};
use crate::grid::{Field, GridSpec};
use crate::scalar::{lit, to_f64, Real};
use crate::surfaces::{make_product_torus, ImmersionGrid};
use crate::tolerance::Tolerances;
use crate::xi::{pinching_report, xi_estimate, xi_report, Condition, IdentityId, IdentityOutcome, XiReport};

/// On-disk surface: `x` holds `4·nu·nv` reals, row-major over `(u, v)`, in
/// component order `(Re z¹, Im z¹, Re z², Im z²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub nu: usize,
    pub nv: usize,
    pub period_u: f64,
    pub period_v: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub x: Vec<f64>,
}

impl SurfaceFile {
    pub fn from_surface<T: Real>(m: &ImmersionGrid<T>) -> Self {
        let spec = m.spec();
        Self {
            nu: spec.nu,
            nv: spec.nv,
            period_u: to_f64(spec.period_u),
            period_v: to_f64(spec.period_v),
            provenance: Some(m.provenance().to_string()),
            x: m.x().values().iter().map(|&v| to_f64(v)).collect(),
        }
    }

    pub fn to_surface(&self) -> Result<ImmersionGrid<f64>> {
        let expected = 4 * self.nu * self.nv;
        if self.x.len() != expected {
            return Err(GeoError::Malformed(format!(
                "x has {} values, expected 4·{}·{} = {expected}",
                self.x.len(),
                self.nu,
                self.nv
            )));
        }
        let spec = GridSpec::new(self.nu, self.nv, self.period_u, self.period_v)?;
        let x = Field::new(spec, 4, self.x.clone())?;
        ImmersionGrid::new(x, self.provenance.clone().unwrap_or_else(|| "surface-file".into()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("surface files always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| GeoError::Malformed(e.to_string()))
    }
}

/// A value or the reason it is absent. Serializes both keys either way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Maybe<V> {
    pub value: Option<V>,
    pub reason: Option<String>,
}

impl<V> Maybe<V> {
    pub fn some(v: V) -> Self {
        Self {
            value: Some(v),
            reason: None,
        }
    }

    pub fn none(reason: impl Into<String>) -> Self {
        Self {
            value: None,
            reason: Some(reason.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    fn of<T: Real>(f: &Field<T>) -> Self {
        Self {
            min: to_f64(f.min_value()),
            max: to_f64(f.max_value()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub source: String,
    pub nu: usize,
    pub nv: usize,
    pub period_u: f64,
    pub period_v: f64,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Invariants {
    pub h_sq: Range,
    pub mean_sq: Range,
    pub gauss_curvature: Range,
    pub position_sq: Range,
    pub h_xi: Maybe<Range>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSection {
    pub a: f64,
    pub b: f64,
    pub distance: f64,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiSection {
    pub is_xi: bool,
    pub parallel_residual: f64,
    pub projection_residual: f64,
    pub normality_residual: f64,
    pub coefficients: Maybe<[f64; 2]>,
    pub fitted: Maybe<FitSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSection {
    pub margin: f64,
    pub holds: bool,
    pub marginal: bool,
}

impl<T: Real> From<&Condition<T>> for ConditionSection {
    fn from(c: &Condition<T>) -> Self {
        Self {
            margin: to_f64(c.margin),
            holds: c.holds,
            marginal: c.marginal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinchingSection {
    pub advisory: bool,
    pub p_min: f64,
    pub p_max: f64,
    pub h_xi_const_residual: f64,
    pub conditions: BTreeMap<String, ConditionSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaslovSection {
    pub periods: [f64; 2],
    pub rounded: [i64; 2],
    pub windings: [i64; 2],
    pub nontrivial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalSection {
    pub gauss_bonnet_integral: f64,
    pub area: f64,
    pub genus: i64,
    pub genus_defect: f64,
    pub balance_residual: f64,
}

/// Comparable part of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBody {
    pub input: InputEcho,
    pub lagrangian_residual: f64,
    pub invariants: Invariants,
    pub xi: Maybe<XiSection>,
    pub pinching: Maybe<PinchingSection>,
    pub identities: BTreeMap<String, Maybe<f64>>,
    pub maslov: Maybe<MaslovSection>,
    pub global: Maybe<GlobalSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub metadata: Metadata,
    pub report: ReportBody,
}

impl ReportFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| GeoError::Malformed(e.to_string()))
    }
}

impl ReportBody {
    /// The body alone, in its canonical serialization.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// Identities whose residual exceeds `tolerance`.
    pub fn failures(&self, tolerance: f64) -> Vec<(String, f64)> {
        self.identities
            .iter()
            .filter_map(|(k, v)| v.value.filter(|r| !(*r <= tolerance)).map(|r| (k.clone(), r)))
            .collect()
    }
}

/// Full pipeline on one surface: geometry, drift, ξ analysis and globals.
///
/// Non-Lagrangian surfaces still produce a report, with the ξ-dependent
/// sections null and the reason recorded.
pub fn analyze<T: Real>(m: &ImmersionGrid<T>, tol: &Tolerances) -> Result<ReportBody> {
    let spec = m.spec();
    let input = InputEcho {
        source: m.provenance().to_string(),
        nu: spec.nu,
        nv: spec.nv,
        period_u: to_f64(spec.period_u),
        period_v: to_f64(spec.period_v),
        tolerances: *tol,
    };
    let b = GeometryBundle::new(m)?;
    let mut invariants = Invariants {
        h_sq: Range::of(&b.h_sq),
        mean_sq: Range::of(&b.mean_sq),
        gauss_curvature: Range::of(&b.metric.k_intrinsic),
        position_sq: Range::of(&b.position_sq()),
        h_xi: Maybe::none("not computed"),
    };
    let lagrangian_residual = to_f64(b.lagrangian_residual);
    let report = match xi_report(&b, tol) {
        Ok(r) => r,
        Err(GeoError::NotLagrangian { residual, tolerance }) => {
            let why = format!("surface is not Lagrangian (residual {residual:e} > {tolerance:e})");
            invariants.h_xi = Maybe::none(why.clone());
            return Ok(ReportBody {
                input,
                lagrangian_residual,
                invariants,
                xi: Maybe::none(why.clone()),
                pinching: Maybe::none(why.clone()),
                identities: IdentityId::ALL
                    .into_iter()
                    .map(|id| (id.as_str().to_string(), Maybe::none(why.clone())))
                    .collect(),
                maslov: Maybe::none(why.clone()),
                global: Maybe::none(why),
            });
        }
        Err(e) => return Err(e),
    };
    invariants.h_xi = Maybe::some(Range {
        min: to_f64(report.pinching.h_xi_min),
        max: to_f64(report.pinching.h_xi_max),
    });
    Ok(body_from(input, lagrangian_residual, invariants, &report))
}

fn body_from<T: Real>(input: InputEcho, lagrangian_residual: f64, invariants: Invariants, r: &XiReport<T>) -> ReportBody {
    let e = &r.estimate;
    let xi = XiSection {
        is_xi: e.is_xi,
        parallel_residual: to_f64(e.parallel_residual),
        projection_residual: to_f64(e.projection_residual),
        normality_residual: to_f64(e.normality_residual),
        coefficients: match e.coefficients {
            Some(c) => Maybe::some([to_f64(c[0]), to_f64(c[1])]),
            None => Maybe::none("ξ̂ is not parallel"),
        },
        fitted: match r.fit {
            Some(f) if f.matched => Maybe::some(FitSection {
                a: to_f64(f.a),
                b: to_f64(f.b),
                distance: to_f64(f.distance),
                matched: true,
            }),
            Some(f) => Maybe {
                value: Some(FitSection {
                    a: to_f64(f.a),
                    b: to_f64(f.b),
                    distance: to_f64(f.distance),
                    matched: false,
                }),
                reason: Some("invariants do not match a product torus".into()),
            },
            None => Maybe::none("invariants admit no product-torus fit"),
        },
    };
    let p = &r.pinching;
    let pinching = PinchingSection {
        advisory: p.advisory,
        p_min: to_f64(p.p_min),
        p_max: to_f64(p.p_max),
        h_xi_const_residual: to_f64(p.h_xi_const_residual),
        conditions: p
            .conditions
            .iter()
            .enumerate()
            .map(|(k, c)| (format!("c{}", k + 1), ConditionSection::from(c)))
            .collect(),
    };
    let identities = r
        .identities
        .iter()
        .map(|(id, o)| {
            let v = match o {
                IdentityOutcome::Residual(x) => Maybe::some(to_f64(*x)),
                IdentityOutcome::Skipped(why) => Maybe::none(why.clone()),
            };
            (id.as_str().to_string(), v)
        })
        .collect();
    let periods = [to_f64(r.periods[0]), to_f64(r.periods[1])];
    let maslov = MaslovSection {
        periods,
        rounded: [periods[0].round() as i64, periods[1].round() as i64],
        windings: r.windings,
        nontrivial: r.global.maslov_nontrivial,
    };
    let g = &r.global;
    let global = GlobalSection {
        gauss_bonnet_integral: to_f64(g.gauss_bonnet_integral),
        area: to_f64(g.area),
        genus: g.genus,
        genus_defect: to_f64(g.genus_defect),
        balance_residual: to_f64(g.balance_residual),
    };
    ReportBody {
        input,
        lagrangian_residual,
        invariants,
        xi: Maybe::some(xi),
        pinching: Maybe::some(pinching),
        identities,
        maslov: Maybe::some(maslov),
        global: Maybe::some(global),
    }
}

/// One cell of a product-torus scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub a: f64,
    pub b: f64,
    pub h2: f64,
    pub mean2: f64,
    pub h_xi: f64,
    pub p_max: f64,
    pub conditions: [Condition<f64>; 4],
    /// `a² + b² ≥ 2a²b²`.
    pub region: bool,
}

pub const SCAN_HEADER: &str = "a,b,h2,H2,Hxi,P_max,c1,c2,c3,c4,region,marginal";

/// Analyzes `S¹(a) × S¹(b)` on `spec` without covariant derivatives.
pub fn scan_cell(a: f64, b: f64, spec: GridSpec<f64>, tol: &Tolerances) -> Result<ScanRow> {
    let m = make_product_torus(a, b, spec)?;
    let bundle = second_fundamental(&m, metric_and_connection(&m)?);
    let e = xi_estimate(&bundle, tol)?;
    let p = pinching_report(&bundle, &e);
    Ok(ScanRow {
        a,
        b,
        h2: bundle.h_sq.mean()[0],
        mean2: bundle.mean_sq.mean()[0],
        h_xi: (p.h_xi_min + p.h_xi_max) / 2.0,
        p_max: p.p.max_abs(),
        conditions: p.conditions,
        region: a * a + b * b >= lit::<f64>(2.0) * a * a * b * b,
    })
}

/// Evenly spaced values `start, …, stop` with `count` entries.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Scan over `as × bs` in row-major order (`a` outer).
pub fn scan(as_: &[f64], bs: &[f64], spec: GridSpec<f64>, tol: &Tolerances) -> Result<Vec<ScanRow>> {
    let mut rows = Vec::with_capacity(as_.len() * bs.len());
    for &a in as_ {
        for &b in bs {
            rows.push(scan_cell(a, b, spec, tol)?);
        }
    }
    Ok(rows)
}

/// CSV with LF endings and 17 significant digits. The trailing `marginal`
/// column lists the conditions whose margin lies within the marginal band.
pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(SCAN_HEADER);
    out.push('\n');
    for r in rows {
        let marginal: Vec<String> = r
            .conditions
            .iter()
            .enumerate()
            .filter(|(_, c)| c.marginal)
            .map(|(k, _)| format!("c{}", k + 1))
            .collect();
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{},{},{},{}",
            r.a,
            r.b,
            r.h2,
            r.mean2,
            r.h_xi,
            r.p_max,
            r.conditions[0].holds,
            r.conditions[1].holds,
            r.conditions[2].holds,
            r.conditions[3].holds,
            r.region,
            marginal.join(";")
        );
    }
    out
}

/// Per-sample fields as CSV: `u,v` followed by one column per field.
pub fn plot_data<T: Real>(m: &ImmersionGrid<T>, tol: &Tolerances) -> Result<String> {
    let b = GeometryBundle::new(m)?;
    let spec = *b.spec();
    let mut cols: Vec<(&str, Field<T>)> = vec![
        ("h_sq", b.h_sq.clone()),
        ("mean_sq", b.mean_sq.clone()),
        ("gauss_curvature", b.metric.k_intrinsic.clone()),
        ("position_sq", b.position_sq()),
    ];
    if let Ok(e) = xi_estimate(&b, tol) {
        cols.push(("pinching", pinching_report(&b, &e).p));
    }
    let mut out = String::from("u,v");
    for (name, _) in &cols {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for i in 0..spec.len() {
        let (p, q) = spec.coords(i);
        let _ = write!(out, "{:.16e},{:.16e}", to_f64(spec.u(p)), to_f64(spec.v(q)));
        for (_, f) in &cols {
            let _ = write!(out, ",{:.16e}", to_f64(f.get(i, 0)));
        }
        out.push('\n');
    }
    Ok(out)
}

use std::fs;

use xigeo_core::curves::PlaneCurve;
use xigeo_core::grid::GridSpec;
use xigeo_core::report::SurfaceFile;
use xigeo_core::surfaces::{make_equivariant, make_product_curves, make_product_torus, make_twisted_torus};
use xigeo_core::Immersion64;

use crate::{CliError, Family, SourceArgs};

fn need(value: Option<f64>, flag: &str, family: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--family {family} needs --{flag}")))
}

/// Builds or loads the surface named by exactly one of `--family` and `--input`.
pub fn load(s: &SourceArgs) -> Result<Immersion64, CliError> {
    match (s.family, &s.input) {
        (Some(_), Some(_)) => Err(CliError::Usage("give either --family or --input, not both".into())),
        (None, None) => Err(CliError::Usage("one of --family or --input is required".into())),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Numeric(anyhow::anyhow!("cannot read {}: {e}", path.display())))?;
            Ok(SurfaceFile::from_json(&text)?.to_surface()?)
        }
        (Some(family), None) => build(family, s),
    }
}

fn build(family: Family, s: &SourceArgs) -> Result<Immersion64, CliError> {
    Ok(match family {
        Family::ProductTorus => {
            let a = need(s.a, "a", "product-torus")?;
            let b = need(s.b, "b", "product-torus")?;
            make_product_torus(a, b, GridSpec::torus(s.nu, s.nv)?)?
        }
        Family::ProductEllipse => {
            let name = "product-ellipse";
            let c1 = PlaneCurve::ellipse(need(s.a1, "a1", name)?, need(s.b1, "b1", name)?, s.nu)?;
            let c2 = PlaneCurve::ellipse(need(s.a2, "a2", name)?, need(s.b2, "b2", name)?, s.nv)?;
            make_product_curves(&c1, &c2)?
        }
        Family::Equivariant => {
            let a = need(s.a, "a", "equivariant")?;
            let b = s.b.unwrap_or(a);
            let c = PlaneCurve::ellipse_at([s.center, 0.0], a, b, s.nu)?;
            make_equivariant(&c, s.nv)?
        }
        Family::Twisted => make_twisted_torus(GridSpec::torus(s.nu, s.nv)?)?,
    })
}

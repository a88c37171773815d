use super::XiEstimate;
use crate::geometry::{GeometryBundle, MaslovData};
use crate::grid::Field;
use crate::scalar::{lit, Real};
use crate::surfaces::dot4;

/// Gauss–Bonnet, genus and the integral balance of a closed surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalChecks<T> {
    /// `∫K dV`.
    pub gauss_bonnet_integral: T,
    pub area: T,
    /// `1 − ∫K dV / 4π`, rounded.
    pub genus: i64,
    /// Distance of the unrounded genus from the nearest integer.
    pub genus_defect: T,
    /// `|∫|H − ξ̂|² − ∫(|ξ̂|² + 4 − |H|²)| / (1 + max of the two integrals)`.
    pub balance_residual: T,
    pub balance_lhs: T,
    pub balance_rhs: T,
    /// At least one Maslov period is a nonzero integer.
    pub maslov_nontrivial: bool,
}

pub fn global_checks<T: Real>(b: &GeometryBundle<T>, e: &XiEstimate<T>, m: &MaslovData<T>) -> GlobalChecks<T> {
    let spec = *b.spec();
    let area_el = &b.metric.area;
    let gb = b.metric.k_intrinsic.integrate_unchecked(area_el);
    let area = b.metric.total_area();
    let four_pi = lit::<T>(4.0) * T::PI();
    let g_raw = T::one() - gb / four_pi;
    let lhs = Field::scalar_from_points(spec, |i| {
        let p = b.x_perp.vec4(i);
        dot4(p, p)
    })
    .integrate_unchecked(area_el);
    let rhs = Field::scalar_from_points(spec, |i| {
        let xi = e.xi_hat.vec4(i);
        dot4(xi, xi) + lit(4.0) - b.mean_sq.get(i, 0)
    })
    .integrate_unchecked(area_el);
    GlobalChecks {
        gauss_bonnet_integral: gb,
        area,
        genus: g_raw.round().to_i64().unwrap_or(i64::MIN),
        genus_defect: (g_raw - g_raw.round()).abs(),
        balance_residual: (lhs - rhs).abs() / (T::one() + lhs.abs().max(rhs.abs())),
        balance_lhs: lhs,
        balance_rhs: rhs,
        maslov_nontrivial: m.nontrivial(),
    }
}

use super::XiEstimate;
use crate::geometry::GeometryBundle;
use crate::grid::Field;
use crate::scalar::{lit, Real};
use crate::surfaces::dot4;

/// Margins at or above this count as satisfied.
pub const CONDITION_SLACK: f64 = 1e-8;
/// Margins within this of zero are flagged as marginal.
pub const MARGINAL_BAND: f64 = 1e-6;

/// One side condition of the rigidity theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition<T> {
    /// Minimum over the surface of the quantity required to be nonnegative.
    pub margin: T,
    pub holds: bool,
    /// `|margin|` is too small to decide the sign reliably.
    pub marginal: bool,
}

impl<T: Real> Condition<T> {
    fn new(margin: T) -> Self {
        Self {
            margin,
            holds: margin >= -lit::<T>(CONDITION_SLACK),
            marginal: margin.abs() <= lit(MARGINAL_BAND),
        }
    }
}

/// Pinching functional `P = |h|² + |H − ξ̂|² − |ξ̂|² − 4` and the side
/// conditions
///
/// 1. `|h|² ≥ 2`
/// 2. `|H|² ≥ 2`
/// 3. `|h|² ≥ ⟨H, H − ξ̂⟩`
/// 4. `⟨H, ξ̂⟩ ≥ 0`
#[derive(Debug, Clone)]
pub struct PinchingReport<T> {
    pub p: Field<T>,
    pub p_min: T,
    pub p_max: T,
    pub conditions: [Condition<T>; 4],
    /// `max⟨H, ξ̂⟩ − min⟨H, ξ̂⟩`.
    pub h_xi_const_residual: T,
    pub h_xi_min: T,
    pub h_xi_max: T,
    /// The surface is not a ξ-submanifold, so the numbers are advisory only.
    pub advisory: bool,
}

pub fn pinching_report<T: Real>(b: &GeometryBundle<T>, e: &XiEstimate<T>) -> PinchingReport<T> {
    let spec = *b.spec();
    let four = lit::<T>(4.0);
    let h_xi = Field::scalar_from_points(spec, |i| dot4(b.mean.vec4(i), e.xi_hat.vec4(i)));
    let h_hmx = Field::scalar_from_points(spec, |i| {
        let (h, xi) = (b.mean.vec4(i), e.xi_hat.vec4(i));
        dot4(h, h) - dot4(h, xi)
    });
    let p = Field::scalar_from_points(spec, |i| {
        let (h, xi) = (b.mean.vec4(i), e.xi_hat.vec4(i));
        let mut d = [T::zero(); 4];
        for k in 0..4 {
            d[k] = h[k] - xi[k];
        }
        b.h_sq.get(i, 0) + dot4(d, d) - dot4(xi, xi) - four
    });
    let c3 = b.h_sq.zip_with(&h_hmx, |a, c| a - c);
    let two = lit::<T>(2.0);
    let conditions = [
        Condition::new(b.h_sq.min_value() - two),
        Condition::new(b.mean_sq.min_value() - two),
        Condition::new(c3.min_value()),
        Condition::new(h_xi.min_value()),
    ];
    PinchingReport {
        p_min: p.min_value(),
        p_max: p.max_value(),
        p,
        conditions,
        h_xi_const_residual: h_xi.max_value() - h_xi.min_value(),
        h_xi_min: h_xi.min_value(),
        h_xi_max: h_xi.max_value(),
        advisory: !e.is_xi,
    }
}

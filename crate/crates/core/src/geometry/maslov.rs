use super::{raise, GeometryBundle, SupResidual};
use crate::error::{GeoError, Result};
use crate::grid::{Axis, Field};
use crate::scalar::{count, lit, to_f64, wrap_angle, Real};
use crate::surfaces::{apply_j, dot4};

/// Lagrangian angle, Maslov form and Maslov periods.
#[derive(Debug, Clone)]
pub struct MaslovData<T> {
    /// `β ∈ (−π, π]` with `e^{iβ} = Ω(x_u, x_v)/√det g`.
    pub beta: Field<T>,
    /// `α(∂_a) = −⟨JH, x_a⟩`.
    pub alpha: Field<T>,
    /// `dβ` from spectral derivatives of `e^{iβ}`; single valued.
    pub dbeta: Field<T>,
    /// `(1/2π)∮α` along the `u` and `v` generators, averaged over lines.
    pub periods: [T; 2],
    /// Winding of `β` along the first `u` and `v` lines, from wrapped increments.
    pub windings: [i64; 2],
    /// Largest deviation of `|Ω(x_u, x_v)|/√det g` from one.
    pub unit_defect: T,
    /// `sup|dβ − α| / (1 + sup|α|)`.
    pub dbeta_alpha_residual: T,
    /// `sup|x_*(∇β) + JH| / (1 + max(sup|∇β|, sup|H|))` with `∇β` from `dβ`.
    pub theorem_residual: T,
}

impl<T: Real> MaslovData<T> {
    /// At least one period is a nonzero integer.
    pub fn nontrivial(&self) -> bool {
        self.periods
            .iter()
            .any(|p| p.round() != T::zero() && (*p - p.round()).abs() <= lit(1e-3))
    }

    pub fn rounded_periods(&self) -> [i64; 2] {
        [
            self.periods[0].round().to_i64().unwrap_or(0),
            self.periods[1].round().to_i64().unwrap_or(0),
        ]
    }

    /// Largest distance of a period from the nearest integer.
    pub fn integrality_defect(&self) -> T {
        self.periods
            .iter()
            .map(|p| (*p - p.round()).abs())
            .fold(T::zero(), T::max)
    }
}

/// `Ω(X, Y) = X_{z¹} Y_{z²} − X_{z²} Y_{z¹}` for `Ω = dz¹ ∧ dz²`.
#[inline]
fn holomorphic_area<T: Real>(x: [T; 4], y: [T; 4]) -> (T, T) {
    let mul = |a: (T, T), b: (T, T)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let p = mul((x[0], x[1]), (y[2], y[3]));
    let q = mul((x[2], x[3]), (y[0], y[1]));
    (p.0 - q.0, p.1 - q.1)
}

/// Lagrangian angle and Maslov data; refuses surfaces whose Lagrangian
/// residual exceeds `tolerance`.
pub fn maslov<T: Real>(b: &GeometryBundle<T>, tolerance: T) -> Result<MaslovData<T>> {
    if !(b.lagrangian_residual <= tolerance) {
        return Err(GeoError::NotLagrangian {
            residual: to_f64(b.lagrangian_residual),
            tolerance: to_f64(tolerance),
        });
    }
    let spec = *b.spec();
    let n = spec.len();
    let e = Field::from_points(spec, 2, |i, out| {
        let [xu, xv] = b.jets.tangent(i);
        let (re, im) = holomorphic_area(xu, xv);
        let s = b.metric.area.get(i, 0);
        out[0] = re / s;
        out[1] = im / s;
    });
    let beta = Field::scalar_from_points(spec, |i| e.get(i, 1).atan2(e.get(i, 0)));
    let unit_defect = (0..n)
        .map(|i| (e.get(i, 0).hypot(e.get(i, 1)) - T::one()).abs())
        .fold(T::zero(), T::max);
    let de = [e.derivative(Axis::U, 1), e.derivative(Axis::V, 1)];
    let dbeta = Field::from_points(spec, 2, |i, out| {
        let (re, im) = (e.get(i, 0), e.get(i, 1));
        let m = re * re + im * im;
        for a in 0..2 {
            out[a] = (re * de[a].get(i, 1) - im * de[a].get(i, 0)) / m;
        }
    });
    let alpha = Field::from_points(spec, 2, |i, out| {
        let jh = apply_j(b.mean.vec4(i));
        let xt = b.jets.tangent(i);
        out[0] = -dot4(jh, xt[0]);
        out[1] = -dot4(jh, xt[1]);
    });

    let mut consistency = SupResidual::new();
    let mut theorem = SupResidual::new();
    for i in 0..n {
        for a in 0..2 {
            consistency.push_scalar(dbeta.get(i, a), alpha.get(i, a));
        }
        let gi = b.metric.g_inv_at(i);
        let up = raise(&gi, [dbeta.get(i, 0), dbeta.get(i, 1)]);
        let xt = b.jets.tangent(i);
        let jh = apply_j(b.mean.vec4(i));
        let mut grad = [T::zero(); 4];
        let mut diff = [T::zero(); 4];
        for k in 0..4 {
            grad[k] = up[0] * xt[0][k] + up[1] * xt[1][k];
            diff[k] = grad[k] + jh[k];
        }
        theorem.push(dot4(grad, grad).sqrt(), dot4(jh, jh).sqrt(), dot4(diff, diff).sqrt());
    }

    let two_pi = T::PI() + T::PI();
    let (nu, nv) = (spec.nu, spec.nv);
    let mut periods = [T::zero(); 2];
    for q in 0..nv {
        let mut s = T::zero();
        for p in 0..nu {
            s += alpha.get(spec.index(p, q), 0);
        }
        periods[0] += s * spec.du();
    }
    for p in 0..nu {
        let mut s = T::zero();
        for q in 0..nv {
            s += alpha.get(spec.index(p, q), 1);
        }
        periods[1] += s * spec.dv();
    }
    periods[0] /= two_pi * count::<T>(nv);
    periods[1] /= two_pi * count::<T>(nu);

    let winding = |idx: &dyn Fn(usize) -> usize, len: usize| {
        let mut s = T::zero();
        for k in 0..len {
            s += wrap_angle(beta.get(idx((k + 1) % len), 0) - beta.get(idx(k), 0));
        }
        (s / two_pi).round().to_i64().unwrap_or(0)
    };
    let windings = [
        winding(&|p| spec.index(p, 0), nu),
        winding(&|q| spec.index(0, q), nv),
    ];

    Ok(MaslovData {
        beta,
        alpha,
        dbeta,
        periods,
        windings,
        unit_defect,
        dbeta_alpha_residual: consistency.value(),
        theorem_residual: theorem.value(),
    })
}

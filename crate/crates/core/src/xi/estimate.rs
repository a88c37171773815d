use crate::error::{GeoError, Result};
use crate::geometry::{pair, GeometryBundle};
use crate::grid::{Axis, Field};
use crate::scalar::{lit, to_f64, Real};
use crate::surfaces::{apply_j, dot4};
use crate::tolerance::Tolerances;

/// Tangent/normal split of the position vector.
#[derive(Debug, Clone)]
pub struct PositionSplit<T> {
    pub x_top: Field<T>,
    pub x_perp: Field<T>,
    /// `|x^⊤|²`.
    pub x_top_sq: Field<T>,
    /// `sup|x^⊤ + x^⊥ − x|`.
    pub defect: T,
}

/// `x^⊤ = g^{ij} t_i x_j` and `x^⊥ = x − x^⊤`.
pub fn split_position<T: Real>(b: &GeometryBundle<T>) -> PositionSplit<T> {
    let spec = *b.spec();
    let mut defect = T::zero();
    for i in 0..spec.len() {
        let (t, p, x) = (b.x_top.vec4(i), b.x_perp.vec4(i), b.surface.point(i));
        for k in 0..4 {
            defect = defect.max((t[k] + p[k] - x[k]).abs());
        }
    }
    PositionSplit {
        x_top: b.x_top.clone(),
        x_perp: b.x_perp.clone(),
        x_top_sq: b.x_top.norms().map(|r| r * r),
        defect,
    }
}

/// Pointwise estimate `ξ̂ = H + x^⊥` and its parallelism test.
#[derive(Debug, Clone)]
pub struct XiEstimate<T> {
    pub xi_hat: Field<T>,
    /// Normal covector `ξ̂_c = ⟨ξ̂, J x_c⟩`, equal to the lowered components
    /// of the tangent field `w = −Jξ̂`.
    pub xi_cov: Field<T>,
    /// Coordinate components `w^a` of `−Jξ̂` projected to the tangent plane.
    pub w: Field<T>,
    /// `sup|−Jξ̂ − w^a x_a| / (1 + sup|ξ̂|)`.
    pub projection_residual: T,
    /// `sup|⟨ξ̂, e_i⟩| / (1 + sup|ξ̂|)` over unit coordinate tangents.
    pub normality_residual: T,
    /// `sup|∇w| / (1 + sup|w|)`.
    pub parallel_residual: T,
    pub is_xi: bool,
    /// Mean of `⟨ξ̂, J e_i⟩` over the Gram–Schmidt frame of `(∂_u, ∂_v)`,
    /// present only when `ξ̂` is parallel.
    pub coefficients: Option<[T; 2]>,
}

/// Estimates `ξ̂` and tests whether it is parallel. Refuses surfaces that are
/// not Lagrangian within `tol.lagrangian`.
pub fn xi_estimate<T: Real>(b: &GeometryBundle<T>, tol: &Tolerances) -> Result<XiEstimate<T>> {
    if !(to_f64(b.lagrangian_residual) <= tol.lagrangian) {
        return Err(GeoError::NotLagrangian {
            residual: to_f64(b.lagrangian_residual),
            tolerance: tol.lagrangian,
        });
    }
    let spec = *b.spec();
    let n = spec.len();
    let xi_hat = b.mean.zip_with(&b.x_perp, |h, p| h + p);
    let xi_cov = b.normal_covector(&xi_hat);
    let xi_sup = xi_hat.sup_norm();

    let mut normal = T::zero();
    let mut projection = T::zero();
    let w = Field::from_points(spec, 2, |i, out| {
        let gi = b.metric.g_inv_at(i);
        let xt = b.jets.tangent(i);
        let xi = xi_hat.vec4(i);
        for x in xt {
            normal = normal.max(dot4(xi, x).abs() / dot4(x, x).sqrt());
        }
        let up = crate::geometry::raise(&gi, [xi_cov.get(i, 0), xi_cov.get(i, 1)]);
        let target = apply_j(xi);
        let mut d = T::zero();
        for k in 0..4 {
            let r = -target[k] - up[0] * xt[0][k] - up[1] * xt[1][k];
            d += r * r;
        }
        projection = projection.max(d.sqrt());
        out.copy_from_slice(&up);
    });

    let dw = [xi_cov.derivative(Axis::U, 1), xi_cov.derivative(Axis::V, 1)];
    let (mut grad_sup, mut w_sup) = (T::zero(), T::zero());
    for i in 0..n {
        let gi = b.metric.g_inv_at(i);
        let gam = b.metric.christoffel_at(i);
        let wc = [xi_cov.get(i, 0), xi_cov.get(i, 1)];
        w_sup = w_sup.max(pair(&gi, wc, wc).max(T::zero()).sqrt());
        // w_{c;a} = ∂_a w_c − Γ^e_ac w_e
        let mut cov = [[T::zero(); 2]; 2];
        for a in 0..2 {
            for c in 0..2 {
                cov[a][c] = dw[a].get(i, c) - gam[0][a][c] * wc[0] - gam[1][a][c] * wc[1];
            }
        }
        let mut s = T::zero();
        for a in 0..2 {
            for bb in 0..2 {
                s += gi[a][bb] * pair(&gi, cov[a], cov[bb]);
            }
        }
        grad_sup = grad_sup.max(s.max(T::zero()).sqrt());
    }
    let parallel_residual = grad_sup / (T::one() + w_sup);
    let is_xi = to_f64(parallel_residual) <= tol.xi;
    let coefficients = is_xi.then(|| frame_coefficients(b, &xi_hat));
    Ok(XiEstimate {
        xi_hat,
        xi_cov,
        w,
        projection_residual: projection / (T::one() + xi_sup),
        normality_residual: normal / (T::one() + xi_sup),
        parallel_residual,
        is_xi,
        coefficients,
    })
}

fn frame_coefficients<T: Real>(b: &GeometryBundle<T>, xi: &Field<T>) -> [T; 2] {
    let n = b.spec().len();
    let mut sums = [T::zero(); 2];
    for i in 0..n {
        let [xu, xv] = b.jets.tangent(i);
        let nu = dot4(xu, xu).sqrt();
        let mut e1 = xu;
        e1.iter_mut().for_each(|c| *c /= nu);
        let proj = dot4(xv, e1);
        let mut e2 = [T::zero(); 4];
        for k in 0..4 {
            e2[k] = xv[k] - proj * e1[k];
        }
        let n2 = dot4(e2, e2).sqrt();
        e2.iter_mut().for_each(|c| *c /= n2);
        let x = xi.vec4(i);
        sums[0] += dot4(x, apply_j(e1));
        sums[1] += dot4(x, apply_j(e2));
    }
    let count = crate::scalar::count::<T>(n);
    [sums[0] / count, sums[1] / count]
}

/// Best product torus `S¹(a) × S¹(b)` matching the invariants of a surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyFit<T> {
    pub a: T,
    pub b: T,
    /// Largest deviation of any compared invariant from its closed form.
    pub distance: T,
    /// The fit counts as a match: `ξ̂` is parallel and `distance ≤ 1e−6`.
    pub matched: bool,
}

/// Fits `(a, b)` from the means of `|H − ξ̂|² = a² + b²` and
/// `|h|² = 1/a² + 1/b²`, then compares `|ξ̂|²`, `⟨H, ξ̂⟩`, `|H|²`, `K` and the
/// area against their product-torus values.
pub fn fit_product_torus<T: Real>(b: &GeometryBundle<T>, e: &XiEstimate<T>) -> Option<FamilyFit<T>> {
    let area = b.metric.total_area();
    let avg = |f: &Field<T>| f.integrate_unchecked(&b.metric.area) / area;
    let hmx_sq = b.x_perp.norms().map(|r| r * r);
    let s = avg(&hmx_sq);
    let q = avg(&b.h_sq);
    if !(s > T::zero() && q > T::zero()) {
        return None;
    }
    let p = s / q;
    let disc = (s * s - lit::<T>(4.0) * p).max(T::zero()).sqrt();
    let (big, small) = ((s + disc) / lit(2.0), (s - disc) / lit(2.0));
    if !(small > T::zero()) {
        return None;
    }
    let (r1, r2) = (big.sqrt(), small.sqrt());
    let coef = |a: T| a.recip() - a;
    let (a, bb) = match e.coefficients {
        Some(c) => {
            let d1 = (coef(r1) - c[0]).abs() + (coef(r2) - c[1]).abs();
            let d2 = (coef(r2) - c[0]).abs() + (coef(r1) - c[1]).abs();
            if d2 < d1 {
                (r2, r1)
            } else {
                (r1, r2)
            }
        }
        None => (r1, r2),
    };
    let inv = (a * a).recip() + (bb * bb).recip();
    let xi_sq = coef(a) * coef(a) + coef(bb) * coef(bb);
    let spec = *b.spec();
    let mut dist = T::zero();
    for i in 0..spec.len() {
        let xi = e.xi_hat.vec4(i);
        let h = b.mean.vec4(i);
        dist = dist
            .max((dot4(xi, xi) - xi_sq).abs())
            .max((dot4(h, xi) - (inv - lit(2.0))).abs())
            .max((b.mean_sq.get(i, 0) - inv).abs())
            .max((b.h_sq.get(i, 0) - inv).abs())
            .max((hmx_sq.get(i, 0) - (a * a + bb * bb)).abs())
            .max(b.metric.k_intrinsic.get(i, 0).abs());
    }
    let four_pi2 = lit::<T>(4.0) * T::PI() * T::PI();
    dist = dist.max((area - four_pi2 * a * bb).abs() / area);
    Some(FamilyFit {
        a,
        b: bb,
        distance: dist,
        matched: e.is_xi && dist <= lit(1e-6),
    })
}

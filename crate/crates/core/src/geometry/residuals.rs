use super::{GeometryBundle, SupResidual};
use crate::grid::{Axis, Field};
use crate::scalar::Real;
use crate::surfaces::{apply_j, dot4};

/// Normalized sup-norm residuals of the structure equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureResiduals<T> {
    /// `K det g` against `⟨h₁₁, h₂₂⟩ − |h₁₂|²`.
    pub gauss: T,
    /// `max |∇C_{abc;d} − ∇C_{abd;c}|` relative to `1 + max|∇C|`.
    pub codazzi: T,
    /// Normal curvature from the ambient normal connection against the
    /// commutator of shape operators.
    pub ricci: T,
    /// Normal curvature against the intrinsic curvature tensor.
    pub normal_tangent: T,
    /// Frame derivatives against their tangential and normal parts.
    pub motion: T,
    /// Commutator of second covariant derivatives of `C` against curvature terms.
    pub ricci_identity: T,
}

/// Evaluates every structure-equation residual on a complete bundle.
pub fn curvature_residuals<T: Real>(b: &GeometryBundle<T>) -> CurvatureResiduals<T> {
    let spec = *b.spec();
    let n = spec.len();
    let cov = b.require_covariant();

    let mut gauss = SupResidual::new();
    for i in 0..n {
        let lhs = b.metric.k_intrinsic.get(i, 0) * b.metric.det.get(i, 0);
        let [h11, h12, h22] = [b.sff[0].vec4(i), b.sff[1].vec4(i), b.sff[2].vec4(i)];
        gauss.push_scalar(lhs, dot4(h11, h22) - dot4(h12, h12));
    }

    let mut codazzi = T::zero();
    for i in 0..n {
        let t = cov.grad_cubic.at(i);
        // Swap the last cubic slot with the derivative slot; `ab` packs (a, b).
        for ab in 0..4 {
            for (c, d) in [(0, 1), (1, 0)] {
                let lhs = t[((ab * 2 + c) * 2) + d];
                let rhs = t[((ab * 2 + d) * 2) + c];
                codazzi = codazzi.max((lhs - rhs).abs());
            }
        }
    }
    let codazzi = codazzi / (T::one() + cov.grad_cubic.max_abs());

    // Normal connection ω_a^d_c = g^{de} ⟨x_ac, x_e⟩ at 4a + 2d + c.
    let omega = Field::from_points(spec, 8, |i, out| {
        let xt = b.jets.tangent(i);
        let second = b.jets.second(i);
        let gi = b.metric.g_inv_at(i);
        for a in 0..2 {
            for c in 0..2 {
                let xac = second[a + c];
                let low = [dot4(xac, xt[0]), dot4(xac, xt[1])];
                for d in 0..2 {
                    out[4 * a + 2 * d + c] = gi[d][0] * low[0] + gi[d][1] * low[1];
                }
            }
        }
    });
    let d_omega = [omega.derivative(Axis::U, 1), omega.derivative(Axis::V, 1)];
    let mut ricci = SupResidual::new();
    let mut normal_tangent = SupResidual::new();
    for i in 0..n {
        let w = omega.at(i);
        let g = b.metric.g_at(i);
        let gi = b.metric.g_inv_at(i);
        let c = b.cubic_at(i);
        let k = b.metric.k_intrinsic.get(i, 0);
        let om = |a: usize, d: usize, c: usize| w[4 * a + 2 * d + c];
        let mut r = [[T::zero(); 2]; 2];
        for d in 0..2 {
            for cc in 0..2 {
                let mut v = d_omega[0].get(i, 4 + 2 * d + cc) - d_omega[1].get(i, 2 * d + cc);
                for e in 0..2 {
                    v += om(0, d, e) * om(1, e, cc) - om(1, d, e) * om(0, e, cc);
                }
                r[d][cc] = v;
            }
        }
        for cc in 0..2 {
            for f in 0..2 {
                let lhs = r[0][cc] * g[0][f] + r[1][cc] * g[1][f];
                let mut rhs = T::zero();
                for m in 0..2 {
                    for nn in 0..2 {
                        rhs += gi[m][nn] * (c[0][m][f] * c[1][nn][cc] - c[0][m][cc] * c[1][nn][f]);
                    }
                }
                ricci.push_scalar(lhs, rhs);
                normal_tangent.push_scalar(lhs, k * (g[1][cc] * g[0][f] - g[0][cc] * g[1][f]));
            }
        }
    }

    // Tangential part of the Gauss formula, and the Weingarten formula for
    // the normal frame J x_c.
    let mut scale = T::zero();
    let mut weingarten = SupResidual::new();
    for i in 0..n {
        let xt = b.jets.tangent(i);
        let second = b.jets.second(i);
        let gi = b.metric.g_inv_at(i);
        let gam = b.metric.christoffel_at(i);
        let c = b.cubic_at(i);
        for s in second {
            scale = scale.max(dot4(s, s).sqrt());
        }
        for a in 0..2 {
            for cc in 0..2 {
                let lhs = apply_j(second[a + cc]);
                let mut rhs = [T::zero(); 4];
                for f in 0..2 {
                    let mut coef = T::zero();
                    for e in 0..2 {
                        coef -= gi[e][f] * c[a][e][cc];
                    }
                    let jx = apply_j(xt[f]);
                    for k in 0..4 {
                        rhs[k] += coef * xt[f][k] + gam[f][a][cc] * jx[k];
                    }
                }
                let mut diff = [T::zero(); 4];
                for k in 0..4 {
                    diff[k] = lhs[k] - rhs[k];
                }
                weingarten.push(dot4(lhs, lhs).sqrt(), dot4(rhs, rhs).sqrt(), dot4(diff, diff).sqrt());
            }
        }
    }
    let motion = (b.gauss_formula_defect / (T::one() + scale)).max(weingarten.value());

    let mut identity = SupResidual::new();
    let idx = |a: usize, bb: usize, cc: usize, d: usize| ((a * 2 + bb) * 2 + cc) * 2 + d;
    for i in 0..n {
        let h2 = cov.hess_cubic.at(i);
        let g = b.metric.g_at(i);
        let c = b.cubic_at(i);
        let k = b.metric.k_intrinsic.get(i, 0);
        for a in 0..2 {
            for bb in 0..2 {
                for cc in 0..2 {
                    let lhs = h2[idx(a, bb, cc, 0) * 2 + 1] - h2[idx(a, bb, cc, 1) * 2];
                    let (d, e) = (0, 1);
                    let rhs = -k
                        * (g[d][a] * c[e][bb][cc] - g[e][a] * c[d][bb][cc] + g[d][bb] * c[a][e][cc]
                            - g[e][bb] * c[a][d][cc]
                            + g[d][cc] * c[a][bb][e]
                            - g[e][cc] * c[a][bb][d]);
                    identity.push_scalar(lhs, rhs);
                }
            }
        }
    }

    CurvatureResiduals {
        gauss: gauss.value(),
        codazzi,
        ricci: ricci.value(),
        normal_tangent: normal_tangent.value(),
        motion,
        ricci_identity: identity.value(),
    }
}

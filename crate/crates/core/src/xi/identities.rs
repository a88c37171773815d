use std::cell::OnceCell;
use std::fmt;
use std::str::FromStr;

use super::XiEstimate;
use crate::drift::{divergence_unchecked, drift_unchecked};
use crate::error::{GeoError, Result};
use crate::geometry::{
    contract_normal, curvature_residuals, frame_sum, maslov, pair, raise, trace_pair, CurvatureResiduals,
    GeometryBundle, MaslovData, SupResidual,
};
use crate::grid::{Axis, Field};
use crate::scalar::{lit, to_f64, Real};
use crate::tolerance::Tolerances;

/// Identities checked numerically, named by their wire identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    /// `div JH = ⟨JH, x^⊤⟩`.
    DivJh,
    /// `Δβ = ⟨∇β, x^⊤⟩`.
    LaplaceBeta,
    /// `H_{c;a} = C_acj T^j`.
    MeanGradient,
    /// Second covariant derivative of `H` along a ξ-submanifold.
    MeanHessian,
    /// Drift Laplacian of `|h|² + |H − ξ|²`.
    PinchingDrift,
    /// Laplacian of `|x^⊤|²`.
    TangentLaplacian,
    /// `𝓛⟨H, ξ⟩ = ⟨H, ξ⟩ − Σ h h ξ (H − ξ)`.
    MeanXiDrift,
    /// `½Δ|x|² = 2 − ⟨H, H − ξ⟩`.
    PositionLaplacian,
    /// `½𝓛|x|² = |ξ|² + 2 − |x|² − ⟨H, ξ⟩`.
    PositionDrift,
    /// `x_*(∇β) = −JH`.
    MaslovGradient,
    Gauss,
    Ricci,
    Codazzi,
    /// Normal curvature against the intrinsic curvature on a Lagrangian surface.
    NormalCurvature,
    Motion,
    /// Commutation of second covariant derivatives of `C`.
    RicciIdentity,
}

impl IdentityId {
    pub const ALL: [IdentityId; 16] = [
        IdentityId::DivJh,
        IdentityId::LaplaceBeta,
        IdentityId::MeanGradient,
        IdentityId::MeanHessian,
        IdentityId::PinchingDrift,
        IdentityId::TangentLaplacian,
        IdentityId::MeanXiDrift,
        IdentityId::PositionLaplacian,
        IdentityId::PositionDrift,
        IdentityId::MaslovGradient,
        IdentityId::Gauss,
        IdentityId::Ricci,
        IdentityId::Codazzi,
        IdentityId::NormalCurvature,
        IdentityId::Motion,
        IdentityId::RicciIdentity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::DivJh => "eq2.17",
            IdentityId::LaplaceBeta => "eq2.18",
            IdentityId::MeanGradient => "eq3.2",
            IdentityId::MeanHessian => "eq3.3",
            IdentityId::PinchingDrift => "lem3.2",
            IdentityId::TangentLaplacian => "lem3.3",
            IdentityId::MeanXiDrift => "lem3.4",
            IdentityId::PositionLaplacian => "lem3.5a",
            IdentityId::PositionDrift => "lem3.5b",
            IdentityId::MaslovGradient => "thm2.1",
            IdentityId::Gauss => "gauss",
            IdentityId::Ricci => "ricci",
            IdentityId::Codazzi => "codazzi",
            IdentityId::NormalCurvature => "eq2.13",
            IdentityId::Motion => "motion",
            IdentityId::RicciIdentity => "eq2.12",
        }
    }

    /// Holds only on ξ-submanifolds.
    pub fn xi_only(self) -> bool {
        matches!(
            self,
            IdentityId::DivJh
                | IdentityId::LaplaceBeta
                | IdentityId::MeanGradient
                | IdentityId::MeanHessian
                | IdentityId::PinchingDrift
                | IdentityId::TangentLaplacian
                | IdentityId::MeanXiDrift
                | IdentityId::PositionLaplacian
                | IdentityId::PositionDrift
        )
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| GeoError::Parameter(format!("unknown identity `{s}`")))
    }
}

/// Evaluates identities on one surface, sharing the Maslov data and the
/// structure-equation residuals between them.
pub struct IdentityBattery<'a, T> {
    b: &'a GeometryBundle<T>,
    e: &'a XiEstimate<T>,
    tol: Tolerances,
    maslov: OnceCell<MaslovData<T>>,
    curvature: OnceCell<CurvatureResiduals<T>>,
}

impl<'a, T: Real> IdentityBattery<'a, T> {
    pub fn new(b: &'a GeometryBundle<T>, e: &'a XiEstimate<T>, tol: Tolerances) -> Self {
        Self {
            b,
            e,
            tol,
            maslov: OnceCell::new(),
            curvature: OnceCell::new(),
        }
    }

    /// Why `id` cannot be evaluated on this surface, if it cannot.
    pub fn precondition(&self, id: IdentityId) -> Option<String> {
        let lag = to_f64(self.b.lagrangian_residual);
        if !(lag <= self.tol.lagrangian) {
            return Some(format!(
                "surface is not Lagrangian (residual {lag:e} > {:e})",
                self.tol.lagrangian
            ));
        }
        if self.b.covariant.is_none() {
            return Some("bundle was built without covariant derivatives".into());
        }
        if id.xi_only() && !self.e.is_xi {
            return Some(format!(
                "{id} needs a ξ-submanifold (parallel residual {:e} > {:e})",
                to_f64(self.e.parallel_residual),
                self.tol.xi
            ));
        }
        None
    }

    pub fn maslov(&self) -> &MaslovData<T> {
        self.maslov.get_or_init(|| {
            maslov(self.b, self.b.lagrangian_residual).expect("Lagrangian condition checked by the caller")
        })
    }

    fn curvature(&self) -> &CurvatureResiduals<T> {
        self.curvature.get_or_init(|| curvature_residuals(self.b))
    }

    /// Normalized sup residual of `id`, or a precondition refusal.
    pub fn verify(&self, id: IdentityId) -> Result<T> {
        if let Some(reason) = self.precondition(id) {
            return Err(GeoError::Precondition(reason));
        }
        Ok(self.evaluate(id))
    }

    fn evaluate(&self, id: IdentityId) -> T {
        match id {
            IdentityId::DivJh => self.div_jh(),
            IdentityId::LaplaceBeta => self.laplace_beta(),
            IdentityId::MeanGradient => self.mean_gradient(),
            IdentityId::MeanHessian => self.mean_hessian(),
            IdentityId::PinchingDrift => self.pinching_drift(),
            IdentityId::TangentLaplacian => self.tangent_laplacian(),
            IdentityId::MeanXiDrift => self.mean_xi_drift(),
            IdentityId::PositionLaplacian => self.position(false),
            IdentityId::PositionDrift => self.position(true),
            IdentityId::MaslovGradient => self.maslov().theorem_residual,
            IdentityId::Gauss => self.curvature().gauss,
            IdentityId::Ricci => self.curvature().ricci,
            IdentityId::Codazzi => self.curvature().codazzi,
            IdentityId::NormalCurvature => self.curvature().normal_tangent,
            IdentityId::Motion => self.curvature().motion,
            IdentityId::RicciIdentity => self.curvature().ricci_identity,
        }
    }

    fn h_cov(&self, i: usize) -> [T; 2] {
        self.b.mean_cov_at(i)
    }

    /// `(H − ξ̂)_c`.
    fn hmx_cov(&self, i: usize) -> [T; 2] {
        let h = self.b.mean_cov.at(i);
        let x = self.e.xi_cov.at(i);
        [h[0] - x[0], h[1] - x[1]]
    }

    fn xi_cov(&self, i: usize) -> [T; 2] {
        let x = self.e.xi_cov.at(i);
        [x[0], x[1]]
    }

    fn t_up(&self, i: usize) -> [T; 2] {
        self.b.x_top_coords_at(i)
    }

    fn div_jh(&self) -> T {
        let b = self.b;
        let spec = *b.spec();
        // JH = V^a x_a with V_a = −H_a.
        let v = Field::from_points(spec, 2, |i, out| {
            let h = self.h_cov(i);
            out.copy_from_slice(&raise(&b.metric.g_inv_at(i), [-h[0], -h[1]]));
        });
        let lhs = divergence_unchecked(b, &v);
        let mut r = SupResidual::new();
        for i in 0..spec.len() {
            let (h, t) = (self.h_cov(i), self.t_up(i));
            r.push_scalar(lhs.get(i, 0), -(h[0] * t[0] + h[1] * t[1]));
        }
        r.value()
    }

    fn laplace_beta(&self) -> T {
        let b = self.b;
        let spec = *b.spec();
        let db = &self.maslov().dbeta;
        let v = Field::from_points(spec, 2, |i, out| {
            out.copy_from_slice(&raise(&b.metric.g_inv_at(i), [db.get(i, 0), db.get(i, 1)]));
        });
        let lhs = divergence_unchecked(b, &v);
        let mut r = SupResidual::new();
        for i in 0..spec.len() {
            let t = self.t_up(i);
            r.push_scalar(lhs.get(i, 0), db.get(i, 0) * t[0] + db.get(i, 1) * t[1]);
        }
        r.value()
    }

    fn mean_gradient(&self) -> T {
        let b = self.b;
        let cov = b.require_covariant();
        let mut r = SupResidual::new();
        for i in 0..b.spec().len() {
            let c = b.cubic_at(i);
            let t = self.t_up(i);
            for a in 0..2 {
                for cc in 0..2 {
                    let rhs = c[a][cc][0] * t[0] + c[a][cc][1] * t[1];
                    r.push_scalar(cov.grad_mean.get(i, 2 * a + cc), rhs);
                }
            }
        }
        r.value()
    }

    fn mean_hessian(&self) -> T {
        let b = self.b;
        let cov = b.require_covariant();
        let dgm = [cov.grad_mean.derivative(Axis::U, 1), cov.grad_mean.derivative(Axis::V, 1)];
        let idx = |a: usize, m: usize, c: usize, d: usize| ((a * 2 + m) * 2 + c) * 2 + d;
        let mut r = SupResidual::new();
        for i in 0..b.spec().len() {
            let gi = b.metric.g_inv_at(i);
            let gam = b.metric.christoffel_at(i);
            let c = b.cubic_at(i);
            let gc = cov.grad_cubic.at(i);
            let gm = cov.grad_mean.at(i);
            let t = self.t_up(i);
            let hmx_up = raise(&gi, self.hmx_cov(i));
            for a in 0..2 {
                for bb in 0..2 {
                    for cc in 0..2 {
                        // H_{c;ab} with H_{c;a} stored at 2a + c.
                        let mut lhs = dgm[bb].get(i, 2 * a + cc);
                        for e in 0..2 {
                            lhs -= gam[e][bb][a] * gm[2 * e + cc] + gam[e][bb][cc] * gm[2 * a + e];
                        }
                        let mut rhs = c[a][bb][cc];
                        for m in 0..2 {
                            rhs += gc[idx(a, m, cc, bb)] * t[m];
                            for nn in 0..2 {
                                for p in 0..2 {
                                    rhs -= c[a][m][cc] * gi[m][nn] * c[nn][bb][p] * hmx_up[p];
                                }
                            }
                        }
                        r.push_scalar(lhs, rhs);
                    }
                }
            }
        }
        r.value()
    }

    fn pinching_drift(&self) -> T {
        let b = self.b;
        let spec = *b.spec();
        let cov = b.require_covariant();
        let half = lit::<T>(0.5);
        let f = Field::scalar_from_points(spec, |i| {
            let hmx = self.hmx_cov(i);
            b.h_sq.get(i, 0) + pair(&b.metric.g_inv_at(i), hmx, hmx)
        });
        let lhs = drift_unchecked(b, &f).drift;
        let mut r = SupResidual::new();
        for i in 0..spec.len() {
            let gi = b.metric.g_inv_at(i);
            let c = b.cubic_at(i);
            let (h, hmx) = (self.h_cov(i), self.hmx_cov(i));
            let h2 = b.h_sq.get(i, 0);
            let hh = b.mean_sq.get(i, 0);
            let h_hmx = pair(&gi, h, hmx);
            let rhs = cov.grad_h_sq.get(i, 0) + cov.grad_mean_sq.get(i, 0) + h2
                - half * (h2 - hh) * (lit::<T>(3.0) * h2 - lit::<T>(2.0) * hh + h_hmx)
                + h_hmx
                - frame_sum(&c, &gi, hmx, hmx)
                - frame_sum(&c, &gi, h, hmx);
            r.push_scalar(half * lhs.get(i, 0), rhs);
        }
        r.value()
    }

    fn tangent_laplacian(&self) -> T {
        let b = self.b;
        let spec = *b.spec();
        let half = lit::<T>(0.5);
        let two = lit::<T>(2.0);
        let f = Field::scalar_from_points(spec, |i| {
            let (t, s) = (self.t_up(i), b.tangent_position.at(i));
            t[0] * s[0] + t[1] * s[1]
        });
        let lhs = drift_unchecked(b, &f).laplacian;
        let mut r = SupResidual::new();
        for i in 0..spec.len() {
            let gi = b.metric.g_inv_at(i);
            let c = b.cubic_at(i);
            let t = self.t_up(i);
            let (h, hmx) = (self.h_cov(i), self.hmx_cov(i));
            let xmh = [-hmx[0], -hmx[1]];
            let m = contract_normal(&c, &gi, xmh);
            let mut mtt = T::zero();
            let mut v = [[T::zero(); 2]; 2];
            for l in 0..2 {
                for cc in 0..2 {
                    mtt += m[l][cc] * t[l] * t[cc];
                    v[l][cc] = c[0][l][cc] * t[0] + c[1][l][cc] * t[1];
                }
            }
            let rhs = mtt - trace_pair(&gi, &v, &v) + two - two * pair(&gi, h, hmx) + frame_sum(&c, &gi, hmx, hmx);
            r.push_scalar(half * lhs.get(i, 0), rhs);
        }
        r.value()
    }

    fn mean_xi_drift(&self) -> T {
        let b = self.b;
        let spec = *b.spec();
        let f = Field::scalar_from_points(spec, |i| pair(&b.metric.g_inv_at(i), self.h_cov(i), self.xi_cov(i)));
        let lhs = drift_unchecked(b, &f).drift;
        let mut r = SupResidual::new();
        for i in 0..spec.len() {
            let gi = b.metric.g_inv_at(i);
            let c = b.cubic_at(i);
            let rhs = f.get(i, 0) - frame_sum(&c, &gi, self.xi_cov(i), self.hmx_cov(i));
            r.push_scalar(lhs.get(i, 0), rhs);
        }
        r.value()
    }

    fn position(&self, drift: bool) -> T {
        let b = self.b;
        let spec = *b.spec();
        let half = lit::<T>(0.5);
        let two = lit::<T>(2.0);
        let f = b.position_sq();
        let calc = drift_unchecked(b, &f);
        let mut r = SupResidual::new();
        for i in 0..spec.len() {
            let gi = b.metric.g_inv_at(i);
            let (h, xi) = (self.h_cov(i), self.xi_cov(i));
            let (lhs, rhs) = if drift {
                let rhs = pair(&gi, xi, xi) + two - f.get(i, 0) - pair(&gi, h, xi);
                (calc.drift.get(i, 0), rhs)
            } else {
                (calc.laplacian.get(i, 0), two - pair(&gi, h, self.hmx_cov(i)))
            };
            r.push_scalar(half * lhs, rhs);
        }
        r.value()
    }
}

/// Normalized sup residual of one identity; refuses identities whose
/// preconditions the surface does not meet.
pub fn verify_identity<T: Real>(
    id: IdentityId,
    b: &GeometryBundle<T>,
    e: &XiEstimate<T>,
    tol: &Tolerances,
) -> Result<T> {
    IdentityBattery::new(b, e, *tol).verify(id)
}

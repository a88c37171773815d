//! ξ-submanifold analysis.
//!
//! A surface is a ξ-submanifold when `H + x^⊥ = ξ` for a parallel normal
//! field `ξ`. The estimate `ξ̂ = H + x^⊥` is formed pointwise and its
//! parallelism is tested through the tangent field `w = −Jξ̂`: on a
//! Lagrangian surface `∇^⊥ξ̂ = J∇w`, so `ξ̂` is parallel exactly when the
//! covector `w_c = ⟨ξ̂, J x_c⟩` has vanishing Levi-Civita derivative.
//!
//! Frame sums over an adapted orthonormal frame are evaluated tensorially
//! with the dictionary of [`crate::geometry`]:
//!
//! ```text
//! Σ h_ij^{k*} h_ij^{l*} A^{k*} B^{l*} = tr(g⁻¹ M^A g⁻¹ M^B),   M^A_ab = C_abc g^{cd} A_d
//! Σ h_ij^{k*} ⟨x, e_i⟩⟨x, e_j⟩ A^{k*}  = M^A_ab T^a T^b
//! ⟨A, B⟩                               = g^{cd} A_c B_d
//! ```
//!
//! where normal vectors are carried as covectors `A_c = ⟨A, J x_c⟩`.

mod estimate;
mod global;
mod identities;
mod pinching;

use std::collections::BTreeMap;

pub use estimate::{fit_product_torus, split_position, xi_estimate, FamilyFit, PositionSplit, XiEstimate};
pub use global::{global_checks, GlobalChecks};
pub use identities::{verify_identity, IdentityBattery, IdentityId};
pub use pinching::{pinching_report, Condition, PinchingReport, CONDITION_SLACK, MARGINAL_BAND};

use crate::error::Result;
use crate::geometry::GeometryBundle;
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Outcome of one identity check.
#[derive(Debug, Clone, PartialEq)]
pub enum IdentityOutcome<T> {
    Residual(T),
    Skipped(String),
}

impl<T: Real> IdentityOutcome<T> {
    pub fn residual(&self) -> Option<T> {
        match self {
            IdentityOutcome::Residual(r) => Some(*r),
            IdentityOutcome::Skipped(_) => None,
        }
    }
}

/// Everything the ξ analysis produces for one surface.
#[derive(Debug, Clone)]
pub struct XiReport<T> {
    pub estimate: XiEstimate<T>,
    pub pinching: PinchingReport<T>,
    pub fit: Option<FamilyFit<T>>,
    pub identities: BTreeMap<IdentityId, IdentityOutcome<T>>,
    pub periods: [T; 2],
    pub windings: [i64; 2],
    pub global: GlobalChecks<T>,
}

/// Runs the estimate, the pinching report, every identity and the global
/// checks. Identities whose preconditions fail are recorded as skipped.
pub fn xi_report<T: Real>(b: &GeometryBundle<T>, tol: &Tolerances) -> Result<XiReport<T>> {
    let estimate = xi_estimate(b, tol)?;
    let pinching = pinching_report(b, &estimate);
    let fit = fit_product_torus(b, &estimate);
    let battery = IdentityBattery::new(b, &estimate, *tol);
    let identities = IdentityId::ALL
        .into_iter()
        .map(|id| {
            let outcome = match battery.verify(id) {
                Ok(r) => IdentityOutcome::Residual(r),
                Err(e) => IdentityOutcome::Skipped(e.to_string()),
            };
            (id, outcome)
        })
        .collect();
    let maslov = battery.maslov();
    let global = global_checks(b, &estimate, maslov);
    let (periods, windings) = (maslov.periods, maslov.windings);
    drop(battery);
    Ok(XiReport {
        estimate,
        pinching,
        fit,
        identities,
        periods,
        windings,
        global,
    })
}

use super::plane::rot90;
use super::PlaneCurve;
use crate::error::Result;
use crate::geometry::GeometryBundle;
use crate::grid::Field;
use crate::scalar::{lit, to_f64, Real};
use crate::surfaces::{make_product_curves, ImmersionGrid};
use crate::tolerance::Tolerances;
use crate::xi::xi_estimate;

/// Largest admissible `sup|ξ̂ − ξ_cert|` and parallel residual.
pub const CERTIFICATION_TOL: f64 = 1e-6;

/// Product of two λ-curves together with its analytic `ξ`.
#[derive(Debug, Clone)]
pub struct CertifiedSurface<T> {
    pub surface: ImmersionGrid<T>,
    /// `ξ = λ₁ JT₁ ⊕ λ₂ JT₂`.
    pub xi: Field<T>,
    pub lambdas: [T; 2],
    /// `sup|k + ⟨γ, JT⟩ − λ|` of each factor.
    pub curve_residuals: [T; 2],
    tangents: [Vec<[T; 2]>; 2],
}

/// Builds `γ₁ × γ₂` and attaches the parallel normal field that makes it a
/// ξ-submanifold when each factor is a λ-curve.
pub fn product_xi<T: Real>(
    c1: &PlaneCurve<T>,
    lambda1: T,
    c2: &PlaneCurve<T>,
    lambda2: T,
) -> Result<CertifiedSurface<T>> {
    let surface = make_product_curves(c1, c2)?.with_provenance(format!(
        "product-xi lambda1={} lambda2={} L1={} L2={}",
        to_f64(lambda1),
        to_f64(lambda2),
        to_f64(c1.length()),
        to_f64(c2.length())
    ));
    let tangents = [c1.tangent().to_vec(), c2.tangent().to_vec()];
    let curve_residuals = [c1.lambda_residual(lambda1)?, c2.lambda_residual(lambda2)?];
    let xi = xi_field(&surface, &tangents, [lambda1, lambda2]);
    Ok(CertifiedSurface {
        surface,
        xi,
        lambdas: [lambda1, lambda2],
        curve_residuals,
        tangents,
    })
}

fn xi_field<T: Real>(m: &ImmersionGrid<T>, tangents: &[Vec<[T; 2]>; 2], lambdas: [T; 2]) -> Field<T> {
    let spec = *m.spec();
    Field::from_points(spec, 4, |i, out| {
        let (p, q) = spec.coords(i);
        let (n1, n2) = (rot90(tangents[0][p]), rot90(tangents[1][q]));
        out.copy_from_slice(&[
            lambdas[0] * n1[0],
            lambdas[0] * n1[1],
            lambdas[1] * n2[0],
            lambdas[1] * n2[1],
        ]);
    })
}

/// Result of comparing the analytic `ξ` with the estimate `ξ̂ = H + x^⊥`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certification<T> {
    /// `sup|ξ̂ − ξ_cert|`.
    pub xi_deviation: T,
    pub parallel_residual: T,
    pub is_xi: bool,
    pub passed: bool,
}

impl<T: Real> CertifiedSurface<T> {
    /// The same surface with both `λ` shifted by `delta`, so that the
    /// attached `ξ` no longer matches the geometry.
    pub fn perturbed(&self, delta: T) -> Self {
        let lambdas = [self.lambdas[0] + delta, self.lambdas[1] + delta];
        Self {
            xi: xi_field(&self.surface, &self.tangents, lambdas),
            lambdas,
            ..self.clone()
        }
    }

    /// Runs the geometry kernel and the ξ estimate and compares them with
    /// the attached field.
    pub fn certify(&self, tol: &Tolerances) -> Result<Certification<T>> {
        let b = GeometryBundle::new(&self.surface)?;
        self.certify_with(&b, tol)
    }

    pub fn certify_with(&self, b: &GeometryBundle<T>, tol: &Tolerances) -> Result<Certification<T>> {
        let e = xi_estimate(b, tol)?;
        let mut dev = T::zero();
        for i in 0..self.surface.spec().len() {
            let (a, c) = (e.xi_hat.at(i), self.xi.at(i));
            let d: T = (0..4).map(|k| (a[k] - c[k]) * (a[k] - c[k])).fold(T::zero(), |s, x| s + x);
            dev = dev.max(d.sqrt());
        }
        let limit = lit::<T>(CERTIFICATION_TOL);
        Ok(Certification {
            xi_deviation: dev,
            parallel_residual: e.parallel_residual,
            is_xi: e.is_xi,
            passed: e.is_xi && dev <= limit && e.parallel_residual <= limit,
        })
    }
}

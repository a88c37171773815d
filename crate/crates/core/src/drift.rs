//! Weighted calculus on a surface: gradient, Laplace–Beltrami operator, the
//! drift operator `𝓛f = Δf − ⟨x, ∇f⟩` and Gaussian-weighted integrals.

use crate::error::{GeoError, Result};
use crate::geometry::GeometryBundle;
use crate::grid::{Axis, Field};
use crate::scalar::{lit, Real};

/// A scalar field together with its derived calculus fields.
#[derive(Debug, Clone)]
pub struct ScalarCalc<T> {
    pub f: Field<T>,
    /// Contravariant gradient `g^{ij} f_{,j}`.
    pub gradient: Field<T>,
    pub laplacian: Field<T>,
    /// `𝓛f`.
    pub drift: Field<T>,
}

fn check_scalar<T: Real>(b: &GeometryBundle<T>, f: &Field<T>) -> Result<()> {
    if f.dim() != 1 {
        return Err(GeoError::Parameter(format!(
            "expected a scalar field, got {} components",
            f.dim()
        )));
    }
    if f.spec() != b.spec() {
        return Err(GeoError::Parameter(
            "field and surface live on different grids".into(),
        ));
    }
    f.check_finite()
}

/// `Δf = g^{ij}(f_{,ij} − Γ^k_ij f_{,k})` and `𝓛f = Δf − g^{ij} t_i f_{,j}`.
pub fn drift_laplacian<T: Real>(b: &GeometryBundle<T>, f: &Field<T>) -> Result<ScalarCalc<T>> {
    check_scalar(b, f)?;
    Ok(drift_unchecked(b, f))
}

pub(crate) fn drift_unchecked<T: Real>(b: &GeometryBundle<T>, f: &Field<T>) -> ScalarCalc<T> {
    let spec = *b.spec();
    let [fu, fv] = f.gradient();
    let fuu = f.derivative(Axis::U, 2);
    let fvv = f.derivative(Axis::V, 2);
    let fuv = fu.derivative(Axis::V, 1);
    let two = lit::<T>(2.0);
    let gradient = Field::from_points(spec, 2, |i, out| {
        let gi = b.metric.g_inv_at(i);
        let d = [fu.get(i, 0), fv.get(i, 0)];
        out[0] = gi[0][0] * d[0] + gi[0][1] * d[1];
        out[1] = gi[1][0] * d[0] + gi[1][1] * d[1];
    });
    let laplacian = Field::scalar_from_points(spec, |i| {
        let gi = b.metric.g_inv_at(i);
        let gam = b.metric.christoffel_at(i);
        let d = [fu.get(i, 0), fv.get(i, 0)];
        let hess = [fuu.get(i, 0), fuv.get(i, 0), fvv.get(i, 0)];
        let mut cov = [T::zero(); 3];
        for (s, (a, c)) in [(0usize, 0usize), (0, 1), (1, 1)].into_iter().enumerate() {
            cov[s] = hess[s] - gam[0][a][c] * d[0] - gam[1][a][c] * d[1];
        }
        gi[0][0] * cov[0] + two * gi[0][1] * cov[1] + gi[1][1] * cov[2]
    });
    let drift = Field::scalar_from_points(spec, |i| {
        let t = b.tangent_position.at(i);
        laplacian.get(i, 0) - (t[0] * gradient.get(i, 0) + t[1] * gradient.get(i, 1))
    });
    ScalarCalc {
        f: f.clone(),
        gradient,
        laplacian,
        drift,
    }
}

/// `e^{−|x|²/2}`.
pub fn gaussian_weight<T: Real>(b: &GeometryBundle<T>) -> Field<T> {
    b.position_sq().map(|r| (-r / lit(2.0)).exp())
}

/// `∫ f e^{−|x|²/2} dV`.
pub fn weighted_integral<T: Real>(b: &GeometryBundle<T>, f: &Field<T>) -> Result<T> {
    check_scalar(b, f)?;
    Ok(weighted_unchecked(b, f))
}

fn weighted_unchecked<T: Real>(b: &GeometryBundle<T>, f: &Field<T>) -> T {
    let w = gaussian_weight(b);
    f.zip_with(&w, |a, c| a * c).integrate_unchecked(&b.metric.area)
}

/// Integration-by-parts defect of the drift operator:
/// `|∫u𝓛v w dV + ∫⟨∇u, ∇v⟩ w dV| / (max(|I₁|, |I₂|) + 1)` with Gaussian `w`.
pub fn ibp_residual<T: Real>(b: &GeometryBundle<T>, u: &Field<T>, v: &Field<T>) -> Result<T> {
    check_scalar(b, u)?;
    check_scalar(b, v)?;
    let cu = drift_unchecked(b, u);
    let cv = drift_unchecked(b, v);
    let i1 = weighted_unchecked(b, &u.zip_with(&cv.drift, |a, c| a * c));
    let spec = *b.spec();
    let grad_dot = Field::scalar_from_points(spec, |i| {
        let g = b.metric.g_at(i);
        let (p, q) = (cu.gradient.at(i), cv.gradient.at(i));
        let mut s = T::zero();
        for a in 0..2 {
            for c in 0..2 {
                s += g[a][c] * p[a] * q[c];
            }
        }
        s
    });
    let i2 = weighted_unchecked(b, &grad_dot);
    Ok((i1 + i2).abs() / (i1.abs().max(i2.abs()) + T::one()))
}

/// `(1/√g) ∂_a(√g V^a)` for a contravariant field `V`.
pub fn divergence<T: Real>(b: &GeometryBundle<T>, v: &Field<T>) -> Result<Field<T>> {
    if v.dim() != 2 || v.spec() != b.spec() {
        return Err(GeoError::Parameter(
            "divergence expects a two-component field on the surface grid".into(),
        ));
    }
    v.check_finite()?;
    Ok(divergence_unchecked(b, v))
}

pub(crate) fn divergence_unchecked<T: Real>(b: &GeometryBundle<T>, v: &Field<T>) -> Field<T> {
    let spec = *b.spec();
    let area = &b.metric.area;
    let su = Field::scalar_from_points(spec, |i| area.get(i, 0) * v.get(i, 0)).derivative(Axis::U, 1);
    let sv = Field::scalar_from_points(spec, |i| area.get(i, 0) * v.get(i, 1)).derivative(Axis::V, 1);
    Field::scalar_from_points(spec, |i| (su.get(i, 0) + sv.get(i, 0)) / area.get(i, 0))
}

//! Immersed tori in ℂ² ≅ ℝ⁴, components ordered `(Re z¹, Im z¹, Re z², Im z²)`.

use crate::curves::PlaneCurve;
use crate::error::{GeoError, Result};
use crate::grid::{Axis, Field, GridSpec};
use crate::scalar::{lit, to_f64, Real};

/// Minimum distance from the origin for the profile of an equivariant torus.
pub const MIN_PROFILE_RADIUS: f64 = 1e-6;

/// Complex structure: `(a, b, c, d) ↦ (−b, a, −d, c)`.
#[inline]
pub fn apply_j<T: Real>(v: [T; 4]) -> [T; 4] {
    [-v[1], v[0], -v[3], v[2]]
}

#[inline]
pub fn dot4<T: Real>(a: [T; 4], b: [T; 4]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Standard symplectic form `ω(X, Y) = ⟨JX, Y⟩`.
#[inline]
pub fn symplectic<T: Real>(x: [T; 4], y: [T; 4]) -> T {
    dot4(apply_j(x), y)
}

/// A sampled doubly periodic immersion `x: T² → ℂ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersionGrid<T> {
    x: Field<T>,
    provenance: String,
}

impl<T: Real> ImmersionGrid<T> {
    pub fn new(x: Field<T>, provenance: impl Into<String>) -> Result<Self> {
        if x.dim() != 4 {
            return Err(GeoError::Parameter(format!(
                "an immersion needs 4 components per sample, got {}",
                x.dim()
            )));
        }
        x.check_finite()?;
        Ok(Self {
            x,
            provenance: provenance.into(),
        })
    }

    /// Samples `f(u, v)` on the grid.
    pub fn from_fn(
        spec: GridSpec<T>,
        provenance: impl Into<String>,
        mut f: impl FnMut(T, T) -> [T; 4],
    ) -> Result<Self> {
        let x = Field::from_fn(spec, 4, |u, v, out| out.copy_from_slice(&f(u, v)));
        Self::new(x, provenance)
    }

    pub fn spec(&self) -> &GridSpec<T> {
        self.x.spec()
    }

    pub fn x(&self) -> &Field<T> {
        &self.x
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn point(&self, i: usize) -> [T; 4] {
        self.x.vec4(i)
    }

    /// Applies a unitary map of ℂ² to every sample.
    pub fn transform(&self, u: &Unitary<T>) -> Self {
        let x = Field::from_points(*self.spec(), 4, |i, out| {
            out.copy_from_slice(&u.apply(self.point(i)))
        });
        Self {
            x,
            provenance: format!("{} | unitary", self.provenance),
        }
    }

    /// Adds a constant vector to every sample.
    pub fn translate(&self, c: [T; 4]) -> Self {
        let x = Field::from_points(*self.spec(), 4, |i, out| {
            let p = self.point(i);
            for k in 0..4 {
                out[k] = p[k] + c[k];
            }
        });
        Self {
            x,
            provenance: format!("{} | translated", self.provenance),
        }
    }

    /// Moves the grid origin by `(dp, dq)` samples.
    pub fn shift_origin(&self, dp: usize, dq: usize) -> Self {
        let spec = *self.spec();
        let x = Field::from_points(spec, 4, |i, out| {
            let (p, q) = spec.coords(i);
            let j = spec.index((p + dp) % spec.nu, (q + dq) % spec.nv);
            out.copy_from_slice(&self.point(j));
        });
        Self {
            x,
            provenance: format!("{} | shifted", self.provenance),
        }
    }
}

fn check_positive<T: Real>(name: &str, value: T) -> Result<()> {
    if !(value > T::zero()) || !value.is_finite() {
        return Err(GeoError::Parameter(format!(
            "{name} must be positive and finite, got {}",
            to_f64(value)
        )));
    }
    Ok(())
}

fn check_torus_periods<T: Real>(spec: &GridSpec<T>) -> Result<()> {
    let two_pi = T::PI() + T::PI();
    let tol = lit::<T>(1e-12) * two_pi;
    if (spec.period_u - two_pi).abs() > tol || (spec.period_v - two_pi).abs() > tol {
        return Err(GeoError::InvalidGrid(format!(
            "this family needs periods (2π, 2π), got ({}, {})",
            to_f64(spec.period_u),
            to_f64(spec.period_v)
        )));
    }
    Ok(())
}

/// `x(u, v) = (a e^{iu}, b e^{iv})`.
pub fn make_product_torus<T: Real>(a: T, b: T, spec: GridSpec<T>) -> Result<ImmersionGrid<T>> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    check_torus_periods(&spec)?;
    ImmersionGrid::from_fn(
        spec,
        format!("product-torus a={} b={}", to_f64(a), to_f64(b)),
        |u, v| {
            let (su, cu) = u.sin_cos();
            let (sv, cv) = v.sin_cos();
            [a * cu, a * su, b * cv, b * sv]
        },
    )
}

/// `x(u, v) = (γ₁(u), γ₂(v))` on periods `(L₁, L₂)`.
pub fn make_product_curves<T: Real>(c1: &PlaneCurve<T>, c2: &PlaneCurve<T>) -> Result<ImmersionGrid<T>> {
    for c in [c1, c2] {
        if !c.is_closed() {
            return Err(GeoError::OpenCurve {
                gap: to_f64(c.closure_gap()),
            });
        }
    }
    let spec = GridSpec::new(c1.n(), c2.n(), c1.length(), c2.length())?;
    let x = Field::from_points(spec, 4, |i, out| {
        let (p, q) = spec.coords(i);
        let (a, b) = (c1.gamma()[p], c2.gamma()[q]);
        out.copy_from_slice(&[a[0], a[1], b[0], b[1]]);
    });
    ImmersionGrid::new(
        x,
        format!(
            "product-curves L1={} L2={}",
            to_f64(c1.length()),
            to_f64(c2.length())
        ),
    )
}

/// `x(u, v) = (γ(u) cos v, γ(u) sin v)` with `γ = (γ_x, γ_y)` read as a
/// complex number, on periods `(L, 2π)`.
pub fn make_equivariant<T: Real>(c: &PlaneCurve<T>, nv: usize) -> Result<ImmersionGrid<T>> {
    if !c.is_closed() {
        return Err(GeoError::OpenCurve {
            gap: to_f64(c.closure_gap()),
        });
    }
    let min = c.min_radius();
    if min < lit(MIN_PROFILE_RADIUS) {
        return Err(GeoError::CurveThroughOrigin { min: to_f64(min) });
    }
    let spec = GridSpec::new(c.n(), nv, c.length(), T::PI() + T::PI())?;
    let x = Field::from_points(spec, 4, |i, out| {
        let (p, q) = spec.coords(i);
        let g = c.gamma()[p];
        let (sv, cv) = spec.v(q).sin_cos();
        out.copy_from_slice(&[g[0] * cv, g[1] * cv, g[0] * sv, g[1] * sv]);
    });
    ImmersionGrid::new(x, format!("equivariant L={}", to_f64(c.length())))
}

/// `x(u, v) = (cos u + i cos v, sin u + i sin v)`, a torus on which
/// `ω(x_u, x_v) = −cos(u − v)`; a deliberately non-Lagrangian example.
pub fn make_twisted_torus<T: Real>(spec: GridSpec<T>) -> Result<ImmersionGrid<T>> {
    check_torus_periods(&spec)?;
    ImmersionGrid::from_fn(spec, "twisted-torus", |u, v| {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        [cu, cv, su, sv]
    })
}

/// Largest `|ω(x_u, x_v)| / (|x_u| |x_v|)` over the grid.
pub fn lagrangian_residual<T: Real>(m: &ImmersionGrid<T>) -> Result<T> {
    let xu = m.x().derivative(Axis::U, 1);
    let xv = m.x().derivative(Axis::V, 1);
    let spec = *m.spec();
    let mut worst = T::zero();
    for i in 0..spec.len() {
        let (a, b) = (xu.vec4(i), xv.vec4(i));
        let (na, nb) = (dot4(a, a).sqrt(), dot4(b, b).sqrt());
        let floor = lit::<T>(1e-12);
        if na < floor || nb < floor {
            let (p, q) = spec.coords(i);
            return Err(GeoError::DegenerateMetric {
                min: to_f64(na.min(nb)),
                p,
                q,
            });
        }
        worst = worst.max((symplectic(a, b) / (na * nb)).abs());
    }
    Ok(worst)
}

/// A unitary map of ℂ², stored as a complex 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary<T> {
    /// `m[r][c] = (re, im)`.
    m: [[(T, T); 2]; 2],
}

impl<T: Real> Unitary<T> {
    pub fn identity() -> Self {
        let (o, z) = ((T::one(), T::zero()), (T::zero(), T::zero()));
        Self { m: [[o, z], [z, o]] }
    }

    /// `e^{iφ} [[e^{iα} cos θ, −e^{iβ} sin θ], [e^{−iβ} sin θ, e^{−iα} cos θ]]`,
    /// which covers U(2) as the angles vary.
    pub fn from_angles(phi: T, theta: T, alpha: T, beta: T) -> Self {
        let cis = |t: T| {
            let (s, c) = t.sin_cos();
            (c, s)
        };
        let mul = |a: (T, T), b: (T, T)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
        let scale = |a: (T, T), s: T| (a.0 * s, a.1 * s);
        let (st, ct) = theta.sin_cos();
        let g = cis(phi);
        Self {
            m: [
                [mul(g, scale(cis(alpha), ct)), mul(g, scale(cis(beta), -st))],
                [mul(g, scale(cis(-beta), st)), mul(g, scale(cis(-alpha), ct))],
            ],
        }
    }

    pub fn apply(&self, v: [T; 4]) -> [T; 4] {
        let z = [(v[0], v[1]), (v[2], v[3])];
        let mut out = [T::zero(); 4];
        for r in 0..2 {
            let (mut re, mut im) = (T::zero(), T::zero());
            for c in 0..2 {
                let (a, b) = self.m[r][c];
                re += a * z[c].0 - b * z[c].1;
                im += a * z[c].1 + b * z[c].0;
            }
            out[2 * r] = re;
            out[2 * r + 1] = im;
        }
        out
    }
}

//! Geometry kernel for immersed surfaces in ℂ².
//!
//! Everything is expressed in the coordinate frame `∂_u, ∂_v` of the
//! parameter torus, indices `0 = u`, `1 = v`. The second fundamental form is
//! stored as the all-indices-down cubic form
//!
//! ```text
//! C_abc = ⟨h(∂_a, ∂_b), J x_c⟩,     h(∂_a, ∂_b) = g^{cd} C_abc J x_d
//! ```
//!
//! which is totally symmetric on Lagrangian surfaces. In an adapted
//! orthonormal frame `e_i`, `e_{i*} = J e_i` the usual components are
//! `h_ij^{k*} = C(e_i, e_j, e_k)`. Normal vectors `η` are carried as
//! covectors `η_c = ⟨η, J x_c⟩`, so `⟨η, ζ⟩ = g^{cd} η_c ζ_d` and the frame
//! sums of the structure equations become
//!
//! ```text
//! Σ h_ij^{k*} h_ij^{l*} A^{k*} B^{l*} = tr(g⁻¹ M^A g⁻¹ M^B),   M^A_ab = C_abc g^{cd} A_d
//! Σ h_ij^{k*} ⟨x, e_i⟩⟨x, e_j⟩ A^{k*}  = M^A_ab T^a T^b,         T^a = g^{ab} ⟨x, x_b⟩
//! ```
//!
//! Storage orders: symmetric pairs `(uu, uv, vv)`; Christoffel symbols
//! `Γ^k_ij` at `3k + i + j`; the four independent cubic components at
//! `a + b + c`; `∇C_{abc;d}` at `((a·2 + b)·2 + c)·2 + d` and
//! `∇²C_{abc;de}` at `2·index(∇C_{abc;d}) + e`.

mod bundle;
mod frame;
mod maslov;
mod metric;
mod residuals;

pub use bundle::{covariant_derivatives, second_fundamental, CovariantData, CubicForm, GeometryBundle};
pub use frame::{diagonalize_frame, DiagonalFrame};
pub use maslov::{maslov, MaslovData};
pub use metric::{metric_and_connection, MetricField, MIN_DET};
pub use residuals::{curvature_residuals, CurvatureResiduals};

use crate::scalar::Real;

pub(crate) type Mat2<T> = [[T; 2]; 2];
pub(crate) type Cubic<T> = [[[T; 2]; 2]; 2];

#[inline]
pub(crate) fn sym<T: Real>(c: &[T]) -> Mat2<T> {
    [[c[0], c[1]], [c[1], c[2]]]
}

#[inline]
pub(crate) fn cubic_full<T: Real>(c: &[T]) -> Cubic<T> {
    let mut out = [[[T::zero(); 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for d in 0..2 {
                out[a][b][d] = c[a + b + d];
            }
        }
    }
    out
}

/// `Γ[k][i][j]` from the six stored components.
#[inline]
pub(crate) fn christoffel_full<T: Real>(c: &[T]) -> Cubic<T> {
    let mut out = [[[T::zero(); 2]; 2]; 2];
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                out[k][i][j] = c[3 * k + i + j];
            }
        }
    }
    out
}

#[inline]
pub(crate) fn raise<T: Real>(gi: &Mat2<T>, w: [T; 2]) -> [T; 2] {
    [
        gi[0][0] * w[0] + gi[0][1] * w[1],
        gi[1][0] * w[0] + gi[1][1] * w[1],
    ]
}

/// `g^{cd} A_c B_d`.
#[inline]
pub(crate) fn pair<T: Real>(gi: &Mat2<T>, a: [T; 2], b: [T; 2]) -> T {
    let r = raise(gi, b);
    a[0] * r[0] + a[1] * r[1]
}

/// `M^A_ab = C_abc g^{cd} A_d`.
#[inline]
pub(crate) fn contract_normal<T: Real>(c: &Cubic<T>, gi: &Mat2<T>, a: [T; 2]) -> Mat2<T> {
    let up = raise(gi, a);
    let mut m = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = c[i][j][0] * up[0] + c[i][j][1] * up[1];
        }
    }
    m
}

/// `tr(g⁻¹ A g⁻¹ B)`.
#[inline]
pub(crate) fn trace_pair<T: Real>(gi: &Mat2<T>, a: &Mat2<T>, b: &Mat2<T>) -> T {
    let mut s = T::zero();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    s += gi[i][j] * a[j][k] * gi[k][l] * b[l][i];
                }
            }
        }
    }
    s
}

/// Frame sum `Σ h_ij^{k*} h_ij^{l*} A^{k*} B^{l*}` for normal covectors.
#[inline]
pub(crate) fn frame_sum<T: Real>(c: &Cubic<T>, gi: &Mat2<T>, a: [T; 2], b: [T; 2]) -> T {
    trace_pair(gi, &contract_normal(c, gi, a), &contract_normal(c, gi, b))
}

/// `Σ g^{..}` full contraction of two fully covariant tensors of rank `r`
/// stored in binary index order.
pub(crate) fn full_contraction<T: Real>(gi: &Mat2<T>, a: &[T], b: &[T], rank: u32) -> T {
    let n = 1usize << rank;
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            let mut w = a[i] * b[j];
            if w == T::zero() {
                continue;
            }
            for slot in 0..rank {
                let shift = rank - 1 - slot;
                w *= gi[(i >> shift) & 1][(j >> shift) & 1];
            }
            s += w;
        }
    }
    s
}

/// Sup-norm accumulator for `sup|L − R| / (1 + max(sup|L|, sup|R|))`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SupResidual<T> {
    diff: T,
    lhs: T,
    rhs: T,
}

impl<T: Real> SupResidual<T> {
    pub(crate) fn new() -> Self {
        Self {
            diff: T::zero(),
            lhs: T::zero(),
            rhs: T::zero(),
        }
    }

    /// Records one pointwise comparison given the three magnitudes.
    #[inline]
    pub(crate) fn push(&mut self, lhs: T, rhs: T, diff: T) {
        self.lhs = self.lhs.max(lhs.abs());
        self.rhs = self.rhs.max(rhs.abs());
        self.diff = self.diff.max(diff.abs());
    }

    #[inline]
    pub(crate) fn push_scalar(&mut self, lhs: T, rhs: T) {
        self.push(lhs, rhs, lhs - rhs);
    }

    pub(crate) fn value(&self) -> T {
        self.diff / (T::one() + self.lhs.max(self.rhs))
    }
}

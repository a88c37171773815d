use super::metric::{metric_from_jets, Jets};
use super::{cubic_full, full_contraction, pair, raise, MetricField};
use crate::error::Result;
use crate::grid::{Axis, Field};
use crate::scalar::{lit, Real};
use crate::surfaces::{apply_j, dot4, symplectic, ImmersionGrid};

/// Symmetrized cubic form plus the measured asymmetry of the raw projections.
#[derive(Debug, Clone)]
pub struct CubicForm<T> {
    /// `(C₁₁₁, C₁₁₂, C₁₂₂, C₂₂₂)`.
    pub c: Field<T>,
    /// `max |raw C_abc − C_(abc)|` over the grid.
    pub asymmetry: T,
}

impl<T: Real> CubicForm<T> {
    /// Asymmetry relative to `1 + max|C|`.
    pub fn relative_asymmetry(&self) -> T {
        self.asymmetry / (T::one() + self.c.max_abs())
    }
}

/// Covariant derivatives of the cubic form and of the mean curvature.
#[derive(Debug, Clone)]
pub struct CovariantData<T> {
    /// `∇C_{abc;d}`, 16 components.
    pub grad_cubic: Field<T>,
    /// `∇²C_{abc;de}`, 32 components.
    pub hess_cubic: Field<T>,
    /// `H_{c;a} = ⟨∂_a H, J x_c⟩` at `2a + c`.
    pub grad_mean: Field<T>,
    /// `|∇h|²`.
    pub grad_h_sq: Field<T>,
    /// `|∇^⊥H|²`.
    pub grad_mean_sq: Field<T>,
}

/// Pointwise invariant fields of an immersed surface.
#[derive(Debug, Clone)]
pub struct GeometryBundle<T> {
    pub surface: ImmersionGrid<T>,
    pub metric: MetricField<T>,
    pub(crate) jets: Jets<T>,
    /// `max |ω(x_u, x_v)| / (|x_u||x_v|)`.
    pub lagrangian_residual: T,
    /// `h(∂_a, ∂_b)` as ambient vectors in pair order `(uu, uv, vv)`.
    pub sff: [Field<T>; 3],
    pub cubic: CubicForm<T>,
    /// Mean curvature vector in ℝ⁴.
    pub mean: Field<T>,
    /// `H_c = ⟨H, J x_c⟩`.
    pub mean_cov: Field<T>,
    /// `|h|² = g g g C C`.
    pub h_sq: Field<T>,
    /// `|H|²`.
    pub mean_sq: Field<T>,
    /// `(|H|² − |h|²)/2`, the Gauss-equation route to the curvature.
    pub k_extrinsic: Field<T>,
    /// Scalar curvature `|H|² − |h|²`.
    pub scalar_curvature: Field<T>,
    /// `t_a = ⟨x, x_a⟩`.
    pub tangent_position: Field<T>,
    /// `T^a = g^{ab} t_b`, the coordinates of `x^⊤`.
    pub x_top_coords: Field<T>,
    pub x_top: Field<T>,
    pub x_perp: Field<T>,
    /// Largest tangential component of the tangential part of
    /// `x_ab − Γ^k_ab x_k` removed before the normal projection.
    pub(crate) gauss_formula_defect: T,
    pub covariant: Option<CovariantData<T>>,
}

impl<T: Real> GeometryBundle<T> {
    /// Runs the full kernel: metric, second fundamental form and covariant
    /// derivatives.
    pub fn new(m: &ImmersionGrid<T>) -> Result<Self> {
        let jets = Jets::new(m);
        let metric = metric_from_jets(&jets)?;
        let mut b = build(m, metric, jets);
        b.covariant = Some(covariant(&b));
        Ok(b)
    }

    pub fn spec(&self) -> &crate::grid::GridSpec<T> {
        self.surface.spec()
    }

    #[inline]
    pub fn cubic_at(&self, i: usize) -> [[[T; 2]; 2]; 2] {
        cubic_full(self.cubic.c.at(i))
    }

    #[inline]
    pub(crate) fn mean_cov_at(&self, i: usize) -> [T; 2] {
        let h = self.mean_cov.at(i);
        [h[0], h[1]]
    }

    #[inline]
    pub(crate) fn x_top_coords_at(&self, i: usize) -> [T; 2] {
        let t = self.x_top_coords.at(i);
        [t[0], t[1]]
    }

    /// Covector `⟨η, J x_c⟩` of an ambient normal field.
    pub(crate) fn normal_covector(&self, eta: &Field<T>) -> Field<T> {
        Field::from_points(*self.spec(), 2, |i, out| {
            let e = eta.vec4(i);
            for (c, x) in self.jets.tangent(i).into_iter().enumerate() {
                out[c] = dot4(e, apply_j(x));
            }
        })
    }

    /// `|x|²`.
    pub fn position_sq(&self) -> Field<T> {
        Field::scalar_from_points(*self.spec(), |i| {
            let p = self.surface.point(i);
            dot4(p, p)
        })
    }

    pub fn covariant(&self) -> Option<&CovariantData<T>> {
        self.covariant.as_ref()
    }

    pub(crate) fn require_covariant(&self) -> &CovariantData<T> {
        self.covariant
            .as_ref()
            .expect("bundle built without covariant derivatives")
    }
}

/// Second fundamental form, cubic form, mean curvature and the position
/// split on top of a metric computed from `m`.
pub fn second_fundamental<T: Real>(m: &ImmersionGrid<T>, metric: MetricField<T>) -> GeometryBundle<T> {
    build(m, metric, Jets::new(m))
}

/// Adds `∇C`, `∇²C` and `∇^⊥H` to a bundle.
pub fn covariant_derivatives<T: Real>(mut b: GeometryBundle<T>) -> GeometryBundle<T> {
    if b.covariant.is_none() {
        b.covariant = Some(covariant(&b));
    }
    b
}

fn build<T: Real>(m: &ImmersionGrid<T>, metric: MetricField<T>, jets: Jets<T>) -> GeometryBundle<T> {
    let spec = *m.spec();
    let n = spec.len();
    let mut sff = [
        Field::zeros(spec, 4),
        Field::zeros(spec, 4),
        Field::zeros(spec, 4),
    ];
    let mut c4 = vec![T::zero(); 4 * n];
    let mut mean = vec![T::zero(); 4 * n];
    let mut mean_cov = vec![T::zero(); 2 * n];
    let mut h_sq = vec![T::zero(); n];
    let mut mean_sq = vec![T::zero(); n];
    let mut tpos = vec![T::zero(); 2 * n];
    let mut tcoords = vec![T::zero(); 2 * n];
    let mut x_top = vec![T::zero(); 4 * n];
    let mut x_perp = vec![T::zero(); 4 * n];
    let mut asymmetry = T::zero();
    let mut lagrangian = T::zero();
    let mut defect = T::zero();
    let three = lit::<T>(3.0);
    let two = lit::<T>(2.0);

    let mut sff_vals: [Vec<T>; 3] = [vec![T::zero(); 4 * n], vec![T::zero(); 4 * n], vec![T::zero(); 4 * n]];
    for i in 0..n {
        let xt = jets.tangent(i);
        let second = jets.second(i);
        let gi = metric.g_inv_at(i);
        let gam = metric.christoffel_at(i);
        let jx = [apply_j(xt[0]), apply_j(xt[1])];

        let (na, nb) = (dot4(xt[0], xt[0]).sqrt(), dot4(xt[1], xt[1]).sqrt());
        lagrangian = lagrangian.max((symplectic(xt[0], xt[1]) / (na * nb)).abs());

        let mut h = [[T::zero(); 4]; 3];
        for (s, (a, b)) in [(0usize, 0usize), (0, 1), (1, 1)].into_iter().enumerate() {
            let mut v = second[s];
            for k in 0..2 {
                let g = gam[k][a][b];
                for c in 0..4 {
                    v[c] -= g * xt[k][c];
                }
            }
            let proj = raise(&gi, [dot4(v, xt[0]), dot4(v, xt[1])]);
            let mut tan_sq = T::zero();
            for c in 0..4 {
                let t = proj[0] * xt[0][c] + proj[1] * xt[1][c];
                tan_sq += t * t;
                h[s][c] = v[c] - t;
            }
            defect = defect.max(tan_sq.sqrt());
            sff_vals[s][4 * i..4 * i + 4].copy_from_slice(&h[s]);
        }

        // Raw projections r_{ab,c} = ⟨h_ab, J x_c⟩.
        let r = |s: usize, c: usize| dot4(h[s], jx[c]);
        let (r111, r112, r121, r122, r221, r222) = (r(0, 0), r(0, 1), r(1, 0), r(1, 1), r(2, 0), r(2, 1));
        let c112 = (r112 + two * r121) / three;
        let c122 = (two * r122 + r221) / three;
        for d in [r112 - c112, r121 - c112, r122 - c122, r221 - c122] {
            asymmetry = asymmetry.max(d.abs());
        }
        let c = [r111, c112, c122, r222];
        c4[4 * i..4 * i + 4].copy_from_slice(&c);

        let mut hv = [T::zero(); 4];
        for k in 0..4 {
            hv[k] = gi[0][0] * h[0][k] + two * gi[0][1] * h[1][k] + gi[1][1] * h[2][k];
        }
        mean[4 * i..4 * i + 4].copy_from_slice(&hv);
        mean_cov[2 * i] = dot4(hv, jx[0]);
        mean_cov[2 * i + 1] = dot4(hv, jx[1]);
        mean_sq[i] = dot4(hv, hv);
        h_sq[i] = full_contraction(&gi, &cubic_flat(&c), &cubic_flat(&c), 3);

        let x = m.point(i);
        let t = [dot4(x, xt[0]), dot4(x, xt[1])];
        let up = raise(&gi, t);
        tpos[2 * i..2 * i + 2].copy_from_slice(&t);
        tcoords[2 * i..2 * i + 2].copy_from_slice(&up);
        for k in 0..4 {
            let top = up[0] * xt[0][k] + up[1] * xt[1][k];
            x_top[4 * i + k] = top;
            x_perp[4 * i + k] = x[k] - top;
        }
    }
    let [s0, s1, s2] = sff_vals;
    for (dst, vals) in sff.iter_mut().zip([s0, s1, s2]) {
        *dst = Field::from_points(spec, 4, |i, out| out.copy_from_slice(&vals[4 * i..4 * i + 4]));
    }
    let field = |dim: usize, v: Vec<T>| Field::from_points(spec, dim, |i, out| out.copy_from_slice(&v[dim * i..dim * i + dim]));
    let h_sq = field(1, h_sq);
    let mean_sq = field(1, mean_sq);
    let scalar_curvature = mean_sq.zip_with(&h_sq, |a, b| a - b);
    let k_extrinsic = scalar_curvature.map(|r| r / two);
    GeometryBundle {
        surface: m.clone(),
        metric,
        jets,
        lagrangian_residual: lagrangian,
        sff,
        cubic: CubicForm {
            c: field(4, c4),
            asymmetry,
        },
        mean: field(4, mean),
        mean_cov: field(2, mean_cov),
        h_sq,
        mean_sq,
        k_extrinsic,
        scalar_curvature,
        tangent_position: field(2, tpos),
        x_top_coords: field(2, tcoords),
        x_top: field(4, x_top),
        x_perp: field(4, x_perp),
        gauss_formula_defect: defect,
        covariant: None,
    }
}

/// Expands the four independent components to all eight in binary order.
#[inline]
pub(crate) fn cubic_flat<T: Real>(c: &[T]) -> [T; 8] {
    let mut out = [T::zero(); 8];
    for (k, o) in out.iter_mut().enumerate() {
        *o = c[(k >> 2) + ((k >> 1) & 1) + (k & 1)];
    }
    out
}

fn covariant<T: Real>(b: &GeometryBundle<T>) -> CovariantData<T> {
    let spec = *b.spec();
    let dc = [b.cubic.c.derivative(Axis::U, 1), b.cubic.c.derivative(Axis::V, 1)];
    let grad_cubic = Field::from_points(spec, 16, |i, out| {
        let c = b.cubic_at(i);
        let gam = b.metric.christoffel_at(i);
        for a in 0..2 {
            for bb in 0..2 {
                for cc in 0..2 {
                    for d in 0..2 {
                        let mut v = dc[d].get(i, a + bb + cc);
                        for e in 0..2 {
                            v -= gam[e][d][a] * c[e][bb][cc] + gam[e][d][bb] * c[a][e][cc] + gam[e][d][cc] * c[a][bb][e];
                        }
                        out[((a * 2 + bb) * 2 + cc) * 2 + d] = v;
                    }
                }
            }
        }
    });
    let dg = [grad_cubic.derivative(Axis::U, 1), grad_cubic.derivative(Axis::V, 1)];
    let hess_cubic = Field::from_points(spec, 32, |i, out| {
        let t = grad_cubic.at(i);
        let gam = b.metric.christoffel_at(i);
        let idx = |a: usize, bb: usize, cc: usize, d: usize| ((a * 2 + bb) * 2 + cc) * 2 + d;
        for a in 0..2 {
            for bb in 0..2 {
                for cc in 0..2 {
                    for d in 0..2 {
                        for e in 0..2 {
                            let mut v = dg[e].get(i, idx(a, bb, cc, d));
                            for f in 0..2 {
                                v -= gam[f][e][a] * t[idx(f, bb, cc, d)]
                                    + gam[f][e][bb] * t[idx(a, f, cc, d)]
                                    + gam[f][e][cc] * t[idx(a, bb, f, d)]
                                    + gam[f][e][d] * t[idx(a, bb, cc, f)];
                            }
                            out[idx(a, bb, cc, d) * 2 + e] = v;
                        }
                    }
                }
            }
        }
    });
    let dh = [b.mean.derivative(Axis::U, 1), b.mean.derivative(Axis::V, 1)];
    let grad_mean = Field::from_points(spec, 4, |i, out| {
        let xt = b.jets.tangent(i);
        for a in 0..2 {
            for c in 0..2 {
                out[2 * a + c] = dot4(dh[a].vec4(i), apply_j(xt[c]));
            }
        }
    });
    let grad_h_sq = Field::scalar_from_points(spec, |i| {
        let gi = b.metric.g_inv_at(i);
        let t = grad_cubic.at(i);
        full_contraction(&gi, t, t, 4)
    });
    let grad_mean_sq = Field::scalar_from_points(spec, |i| {
        let gi = b.metric.g_inv_at(i);
        let t = grad_mean.at(i);
        // g^{ab} g^{cd} H_{c;a} H_{d;b}
        let mut s = T::zero();
        for a in 0..2 {
            for bb in 0..2 {
                s += gi[a][bb] * pair(&gi, [t[2 * a], t[2 * a + 1]], [t[2 * bb], t[2 * bb + 1]]);
            }
        }
        s
    });
    CovariantData {
        grad_cubic,
        hess_cubic,
        grad_mean,
        grad_h_sq,
        grad_mean_sq,
    }
}

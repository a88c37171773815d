use crate::error::{GeoError, Result};
use crate::grid::{Axis, Field};
use crate::scalar::{lit, to_f64, Real};
use crate::surfaces::{dot4, ImmersionGrid};

/// Smallest accepted `det g`.
pub const MIN_DET: f64 = 1e-12;

/// Ambient derivatives of the immersion up to second order.
#[derive(Debug, Clone)]
pub(crate) struct Jets<T> {
    pub xu: Field<T>,
    pub xv: Field<T>,
    pub xuu: Field<T>,
    pub xuv: Field<T>,
    pub xvv: Field<T>,
}

impl<T: Real> Jets<T> {
    pub(crate) fn new(m: &ImmersionGrid<T>) -> Self {
        let x = m.x();
        let xu = x.derivative(Axis::U, 1);
        let xuv = xu.derivative(Axis::V, 1);
        Self {
            xuu: x.derivative(Axis::U, 2),
            xvv: x.derivative(Axis::V, 2),
            xv: x.derivative(Axis::V, 1),
            xu,
            xuv,
        }
    }

    #[inline]
    pub(crate) fn tangent(&self, i: usize) -> [[T; 4]; 2] {
        [self.xu.vec4(i), self.xv.vec4(i)]
    }

    /// Second derivatives in symmetric-pair order `(uu, uv, vv)`.
    #[inline]
    pub(crate) fn second(&self, i: usize) -> [[T; 4]; 3] {
        [self.xuu.vec4(i), self.xuv.vec4(i), self.xvv.vec4(i)]
    }
}

/// First fundamental form, its inverse, Christoffel symbols, area element
/// and intrinsic Gauss curvature.
#[derive(Debug, Clone)]
pub struct MetricField<T> {
    /// `(g₁₁, g₁₂, g₂₂)`.
    pub g: Field<T>,
    pub det: Field<T>,
    /// `(g¹¹, g¹², g²²)`.
    pub g_inv: Field<T>,
    /// `Γ^k_ij` at `3k + i + j`.
    pub christoffel: Field<T>,
    /// `√det g`.
    pub area: Field<T>,
    /// Gauss curvature from the Brioschi formula on spectral derivatives of `g`.
    pub k_intrinsic: Field<T>,
}

impl<T: Real> MetricField<T> {
    #[inline]
    pub fn g_at(&self, i: usize) -> [[T; 2]; 2] {
        super::sym(self.g.at(i))
    }

    #[inline]
    pub fn g_inv_at(&self, i: usize) -> [[T; 2]; 2] {
        super::sym(self.g_inv.at(i))
    }

    #[inline]
    pub fn christoffel_at(&self, i: usize) -> [[[T; 2]; 2]; 2] {
        super::christoffel_full(self.christoffel.at(i))
    }

    /// Total area `∫ dV`.
    pub fn total_area(&self) -> T {
        Field::constant(*self.g.spec(), T::one()).integrate_unchecked(&self.area)
    }

    /// Largest Christoffel symbol in absolute value.
    pub fn max_christoffel(&self) -> T {
        self.christoffel.max_abs()
    }
}

/// First fundamental form and Levi-Civita connection of `m`.
pub fn metric_and_connection<T: Real>(m: &ImmersionGrid<T>) -> Result<MetricField<T>> {
    metric_from_jets(&Jets::new(m))
}

pub(crate) fn metric_from_jets<T: Real>(jets: &Jets<T>) -> Result<MetricField<T>> {
    let spec = *jets.xu.spec();
    let g = Field::from_points(spec, 3, |i, out| {
        let [a, b] = jets.tangent(i);
        out[0] = dot4(a, a);
        out[1] = dot4(a, b);
        out[2] = dot4(b, b);
    });
    let det = Field::scalar_from_points(spec, |i| {
        let c = g.at(i);
        c[0] * c[2] - c[1] * c[1]
    });
    let floor = lit::<T>(MIN_DET);
    let (mut min, mut at) = (T::infinity(), 0);
    for (i, &d) in det.values().iter().enumerate() {
        if !(d >= min) {
            min = d;
            at = i;
        }
    }
    if !(min >= floor) {
        let (p, q) = spec.coords(at);
        return Err(GeoError::DegenerateMetric {
            min: to_f64(min),
            p,
            q,
        });
    }
    let g_inv = Field::from_points(spec, 3, |i, out| {
        let c = g.at(i);
        let d = det.get(i, 0);
        out[0] = c[2] / d;
        out[1] = -c[1] / d;
        out[2] = c[0] / d;
    });
    let area = det.map(|d| d.sqrt());

    let gu = g.derivative(Axis::U, 1);
    let gv = g.derivative(Axis::V, 1);
    let dg = [&gu, &gv];
    let christoffel = Field::from_points(spec, 6, |i, out| {
        let gi = super::sym(g_inv.at(i));
        // ∂_l g_ij as d[l][i][j].
        let d = [super::sym(dg[0].at(i)), super::sym(dg[1].at(i))];
        for k in 0..2 {
            for (ij, (a, b)) in [(0, 0), (0, 1), (1, 1)].into_iter().enumerate() {
                let mut s = T::zero();
                for l in 0..2 {
                    s += gi[k][l] * (d[a][b][l] + d[b][a][l] - d[l][a][b]);
                }
                out[3 * k + ij] = s / lit(2.0);
            }
        }
    });

    let guu = g.derivative(Axis::U, 2);
    let gvv = g.derivative(Axis::V, 2);
    let guv = gu.derivative(Axis::V, 1);
    let half = lit::<T>(0.5);
    let k_intrinsic = Field::scalar_from_points(spec, |i| {
        let [e, f, gg] = [g.get(i, 0), g.get(i, 1), g.get(i, 2)];
        let [eu, fu, gu_] = [gu.get(i, 0), gu.get(i, 1), gu.get(i, 2)];
        let [ev, fv, gv_] = [gv.get(i, 0), gv.get(i, 1), gv.get(i, 2)];
        let evv = gvv.get(i, 0);
        let fuv = guv.get(i, 1);
        let guu_ = guu.get(i, 2);
        let m1 = [
            [-half * evv + fuv - half * guu_, half * eu, fu - half * ev],
            [fv - half * gu_, e, f],
            [half * gv_, f, gg],
        ];
        let m2 = [
            [T::zero(), half * ev, half * gu_],
            [half * ev, e, f],
            [half * gu_, f, gg],
        ];
        let d = det.get(i, 0);
        (det3(&m1) - det3(&m2)) / (d * d)
    });

    Ok(MetricField {
        g,
        det,
        g_inv,
        christoffel,
        area,
        k_intrinsic,
    })
}

fn det3<T: Real>(m: &[[T; 3]; 3]) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

//! Doubly periodic sampling grids with Fourier-spectral calculus.
//!
//! Samples sit at `u_p = p·period_u/nu`, `v_q = q·period_v/nv` with no
//! endpoint duplication. Differentiation applies the circulant matrix of the
//! trigonometric interpolant along one axis; integration is the periodic
//! trapezoidal rule with a fixed row-major summation order.

use crate::error::{GeoError, Result};
use crate::scalar::{count, lit, to_f64, Real};

/// Smallest admissible number of samples along either axis.
pub const MIN_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub nu: usize,
    pub nv: usize,
    pub period_u: T,
    pub period_v: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    U,
    V,
}

impl<T: Real> GridSpec<T> {
    pub fn new(nu: usize, nv: usize, period_u: T, period_v: T) -> Result<Self> {
        if nu < MIN_SAMPLES || nv < MIN_SAMPLES {
            return Err(GeoError::InvalidGrid(format!(
                "need at least {MIN_SAMPLES} samples per axis, got {nu}x{nv}"
            )));
        }
        for (name, l) in [("period_u", period_u), ("period_v", period_v)] {
            if !(l.is_finite() && l > T::zero()) {
                return Err(GeoError::InvalidGrid(format!(
                    "{name} must be positive and finite, got {}",
                    to_f64(l)
                )));
            }
        }
        Ok(Self {
            nu,
            nv,
            period_u,
            period_v,
        })
    }

    /// Square grid over `[0, 2π)²`.
    pub fn torus(nu: usize, nv: usize) -> Result<Self> {
        let two_pi = T::PI() + T::PI();
        Self::new(nu, nv, two_pi, two_pi)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn du(&self) -> T {
        self.period_u / count(self.nu)
    }

    #[inline]
    pub fn dv(&self) -> T {
        self.period_v / count(self.nv)
    }

    #[inline]
    pub fn u(&self, p: usize) -> T {
        count::<T>(p) * self.du()
    }

    #[inline]
    pub fn v(&self, q: usize) -> T {
        count::<T>(q) * self.dv()
    }

    #[inline]
    pub fn index(&self, p: usize, q: usize) -> usize {
        p * self.nv + q
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx / self.nv, idx % self.nv)
    }

    pub fn samples(&self, axis: Axis) -> usize {
        match axis {
            Axis::U => self.nu,
            Axis::V => self.nv,
        }
    }

    pub fn period(&self, axis: Axis) -> T {
        match axis {
            Axis::U => self.period_u,
            Axis::V => self.period_v,
        }
    }

    /// Area of one grid cell in parameter space.
    pub fn cell_area(&self) -> T {
        self.du() * self.dv()
    }
}

/// Circulant kernel `k[d]` of the spectral derivative of the given order on
/// an `n`-periodic grid of the given period; `(Df)_j = Σ_k k[(j-k) mod n] f_k`.
pub fn diff_kernel<T: Real>(n: usize, period: T, order: u8) -> Vec<T> {
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    let h = (T::PI() + T::PI()) / count(n);
    let scale = (T::PI() + T::PI()) / period;
    let even = n % 2 == 0;
    let mut k = vec![T::zero(); n];
    match order {
        1 => {
            for (d, kd) in k.iter_mut().enumerate().skip(1) {
                let sign = if d % 2 == 0 { T::one() } else { -T::one() };
                let x = count::<T>(d) * h / two;
                let w = if even { x.tan().recip() } else { x.sin().recip() };
                *kd = half * sign * w * scale;
            }
        }
        2 => {
            let n_t = count::<T>(n);
            k[0] = if even {
                -(n_t * n_t) / lit(12.0) - lit::<T>(1.0) / lit(6.0)
            } else {
                -(n_t * n_t) / lit(12.0) + lit::<T>(1.0) / lit(12.0)
            } * scale
                * scale;
            for (d, kd) in k.iter_mut().enumerate().skip(1) {
                let sign = if d % 2 == 0 { T::one() } else { -T::one() };
                let x = count::<T>(d) * h / two;
                let s = x.sin();
                let w = if even {
                    (s * s).recip()
                } else {
                    x.cos() / (s * s)
                };
                *kd = -half * sign * w * scale * scale;
            }
        }
        _ => panic!("spectral kernel order must be 1 or 2"),
    }
    k
}

/// Spectral derivative of one periodic sequence sampled at `n` equispaced
/// points over `period`.
pub fn periodic_derivative<T: Real>(values: &[T], period: T, order: u8) -> Vec<T> {
    let n = values.len();
    let kernel = diff_kernel(n, period, order);
    (0..n)
        .map(|j| {
            let mut acc = T::zero();
            for (k, &f) in values.iter().enumerate() {
                acc += kernel[(j + n - k) % n] * f;
            }
            acc
        })
        .collect()
}

/// A field of `dim` real components sampled on a periodic grid, stored
/// row-major over `(u, v)` with components innermost.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    spec: GridSpec<T>,
    dim: usize,
    values: Vec<T>,
}

impl<T: Real> Field<T> {
    /// Wraps externally supplied values, rejecting wrong lengths and
    /// non-finite entries.
    pub fn new(spec: GridSpec<T>, dim: usize, values: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(GeoError::Malformed("field dimension must be positive".into()));
        }
        if values.len() != spec.len() * dim {
            return Err(GeoError::Malformed(format!(
                "expected {} values for a {}x{}x{} field, got {}",
                spec.len() * dim,
                spec.nu,
                spec.nv,
                dim,
                values.len()
            )));
        }
        let f = Self { spec, dim, values };
        f.check_finite()?;
        Ok(f)
    }

    pub fn zeros(spec: GridSpec<T>, dim: usize) -> Self {
        Self {
            spec,
            dim,
            values: vec![T::zero(); spec.len() * dim],
        }
    }

    pub fn constant(spec: GridSpec<T>, value: T) -> Self {
        Self {
            spec,
            dim: 1,
            values: vec![value; spec.len()],
        }
    }

    /// Fills each grid point from `(u, v)` coordinates.
    pub fn from_fn(spec: GridSpec<T>, dim: usize, mut f: impl FnMut(T, T, &mut [T])) -> Self {
        let mut out = Self::zeros(spec, dim);
        for p in 0..spec.nu {
            let u = spec.u(p);
            for q in 0..spec.nv {
                let idx = spec.index(p, q) * dim;
                f(u, spec.v(q), &mut out.values[idx..idx + dim]);
            }
        }
        out
    }

    pub fn scalar_from_fn(spec: GridSpec<T>, mut f: impl FnMut(T, T) -> T) -> Self {
        Self::from_fn(spec, 1, |u, v, out| out[0] = f(u, v))
    }

    /// Fills each grid point from its flat point index.
    pub fn from_points(spec: GridSpec<T>, dim: usize, mut f: impl FnMut(usize, &mut [T])) -> Self {
        let mut out = Self::zeros(spec, dim);
        for (i, chunk) in out.values.chunks_exact_mut(dim).enumerate() {
            f(i, chunk);
        }
        out
    }

    pub fn scalar_from_points(spec: GridSpec<T>, mut f: impl FnMut(usize) -> T) -> Self {
        Self::from_points(spec, 1, |i, out| out[0] = f(i))
    }

    #[inline]
    pub fn spec(&self) -> &GridSpec<T> {
        &self.spec
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Components at flat point index `i`.
    #[inline]
    pub fn at(&self, i: usize) -> &[T] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn at_pq(&self, p: usize, q: usize) -> &[T] {
        self.at(self.spec.index(p, q))
    }

    #[inline]
    pub fn get(&self, i: usize, c: usize) -> T {
        self.values[i * self.dim + c]
    }

    /// Four-component value at point `i`.
    #[inline]
    pub fn vec4(&self, i: usize) -> [T; 4] {
        let s = self.at(i);
        [s[0], s[1], s[2], s[3]]
    }

    pub fn component(&self, c: usize) -> Field<T> {
        assert!(c < self.dim);
        Field::scalar_from_points(self.spec, |i| self.get(i, c))
    }

    pub fn map(&self, mut f: impl FnMut(T) -> T) -> Field<T> {
        Field {
            spec: self.spec,
            dim: self.dim,
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Field<T>, mut f: impl FnMut(T, T) -> T) -> Field<T> {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.values.len(), other.values.len());
        Field {
            spec: self.spec,
            dim: self.dim,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// `alpha·self + beta·other`.
    pub fn axpby(&self, alpha: T, other: &Field<T>, beta: T) -> Field<T> {
        self.zip_with(other, |a, b| alpha * a + beta * b)
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |m, &x| if x.abs() > m { x.abs() } else { m })
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_value(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Pointwise Euclidean norm of the component vector.
    pub fn norms(&self) -> Field<T> {
        Field::scalar_from_points(self.spec, |i| {
            self.at(i).iter().map(|&x| x * x).sum::<T>().sqrt()
        })
    }

    /// Maximum pointwise Euclidean norm.
    pub fn sup_norm(&self) -> T {
        self.norms().max_value()
    }

    /// Arithmetic mean of each component.
    pub fn mean(&self) -> Vec<T> {
        let n = count::<T>(self.spec.len());
        (0..self.dim)
            .map(|c| {
                (0..self.spec.len())
                    .map(|i| self.get(i, c))
                    .fold(T::zero(), |a, b| a + b)
                    / n
            })
            .collect()
    }

    pub fn check_finite(&self) -> Result<()> {
        if let Some(pos) = self.values.iter().position(|x| !x.is_finite()) {
            let (p, q) = self.spec.coords(pos / self.dim);
            return Err(GeoError::NonFinite {
                p,
                q,
                component: pos % self.dim,
            });
        }
        Ok(())
    }

    /// Spectral derivative of every component along `axis`.
    ///
    /// Exact for trigonometric polynomials below the Nyquist degree. The
    /// second-order kernel differentiates the interpolant twice, including
    /// the Nyquist cosine on even grids, so it is not the square of the
    /// first-order kernel.
    pub fn differentiate(&self, axis: Axis, order: u8) -> Result<Field<T>> {
        if order != 1 && order != 2 {
            return Err(GeoError::Parameter(format!(
                "derivative order must be 1 or 2, got {order}"
            )));
        }
        self.check_finite()?;
        Ok(self.derivative(axis, order))
    }

    /// Unchecked variant of [`Field::differentiate`] for internal pipelines
    /// whose inputs are already validated.
    pub(crate) fn derivative(&self, axis: Axis, order: u8) -> Field<T> {
        let n = self.spec.samples(axis);
        let kernel = diff_kernel(n, self.spec.period(axis), order);
        let mut out = Field::zeros(self.spec, self.dim);
        let (nu, nv, d) = (self.spec.nu, self.spec.nv, self.dim);
        match axis {
            Axis::U => {
                let row = nv * d;
                for p in 0..nu {
                    let dst = &mut out.values[p * row..(p + 1) * row];
                    for k in 0..nu {
                        let w = kernel[(p + nu - k) % nu];
                        if w == T::zero() {
                            continue;
                        }
                        let src = &self.values[k * row..(k + 1) * row];
                        for (o, &s) in dst.iter_mut().zip(src) {
                            *o += w * s;
                        }
                    }
                }
            }
            Axis::V => {
                let row = nv * d;
                for p in 0..nu {
                    let src = &self.values[p * row..(p + 1) * row];
                    let dst = &mut out.values[p * row..(p + 1) * row];
                    for q in 0..nv {
                        let o = &mut dst[q * d..(q + 1) * d];
                        for k in 0..nv {
                            let w = kernel[(q + nv - k) % nv];
                            if w == T::zero() {
                                continue;
                            }
                            for (oc, &s) in o.iter_mut().zip(&src[k * d..(k + 1) * d]) {
                                *oc += w * s;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// `[∂_u f, ∂_v f]`.
    pub(crate) fn gradient(&self) -> [Field<T>; 2] {
        [self.derivative(Axis::U, 1), self.derivative(Axis::V, 1)]
    }

    /// Periodic trapezoidal rule `Σ f·area_element·du·dv` over a scalar field.
    ///
    /// The sum runs sequentially in row-major order so results are
    /// bit-stable.
    pub fn integrate(&self, area_element: &Field<T>) -> Result<T> {
        if self.dim != 1 || area_element.dim != 1 {
            return Err(GeoError::Parameter("integrate expects scalar fields".into()));
        }
        if self.spec != area_element.spec {
            return Err(GeoError::Parameter(
                "integrand and area element live on different grids".into(),
            ));
        }
        check_area_element(area_element)?;
        Ok(self.integrate_unchecked(area_element))
    }

    pub(crate) fn integrate_unchecked(&self, area_element: &Field<T>) -> T {
        let mut acc = T::zero();
        for (&f, &a) in self.values.iter().zip(&area_element.values) {
            acc += f * a;
        }
        acc * self.spec.cell_area()
    }
}

/// Rejects non-positive area elements, reporting the minimum and its location.
pub fn check_area_element<T: Real>(area: &Field<T>) -> Result<()> {
    let (mut min, mut at) = (T::infinity(), 0);
    for (i, &a) in area.values.iter().enumerate() {
        if !(a >= min) {
            min = a;
            at = i;
        }
    }
    if !(min > T::zero()) {
        let (p, q) = area.spec.coords(at);
        return Err(GeoError::DegenerateMetric {
            min: to_f64(min),
            p,
            q,
        });
    }
    Ok(())
}

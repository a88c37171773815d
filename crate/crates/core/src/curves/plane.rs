use crate::error::{GeoError, Result};
use crate::grid::periodic_derivative;
use crate::scalar::{count, lit, to_f64, Real};

/// Number of samples used to expand the speed of an analytic
/// parametrization in a Fourier series.
const SPEED_SAMPLES: usize = 2048;

/// A plane curve sampled at uniform arc length.
///
/// Closed curves carry `n` samples at `s_k = k·L/n` with no duplicated
/// endpoint. Open curves carry both endpoints, `s_k = k·L/(n-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneCurve<T> {
    gamma: Vec<[T; 2]>,
    tangent: Vec<[T; 2]>,
    curvature: Vec<T>,
    length: T,
    closed: bool,
    closure_gap: T,
}

#[inline]
pub(crate) fn rot90<T: Real>(v: [T; 2]) -> [T; 2] {
    [-v[1], v[0]]
}

#[inline]
fn dot<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    a[0] * b[0] + a[1] * b[1]
}

impl<T: Real> PlaneCurve<T> {
    pub(crate) fn from_parts(
        gamma: Vec<[T; 2]>,
        tangent: Vec<[T; 2]>,
        curvature: Vec<T>,
        length: T,
        closed: bool,
        closure_gap: T,
    ) -> Self {
        debug_assert_eq!(gamma.len(), tangent.len());
        debug_assert_eq!(gamma.len(), curvature.len());
        Self {
            gamma,
            tangent,
            curvature,
            length,
            closed,
            closure_gap,
        }
    }

    /// Counterclockwise circle of radius `r` about the origin, starting at `(r, 0)`.
    pub fn circle(radius: T, n: usize) -> Result<Self> {
        Self::circle_at([T::zero(), T::zero()], radius, n)
    }

    pub fn circle_at(center: [T; 2], radius: T, n: usize) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(GeoError::Parameter(format!(
                "circle radius must be positive, got {}",
                to_f64(radius)
            )));
        }
        check_count(n)?;
        let two_pi = T::PI() + T::PI();
        let mut gamma = Vec::with_capacity(n);
        let mut tangent = Vec::with_capacity(n);
        for k in 0..n {
            let th = two_pi * count::<T>(k) / count::<T>(n);
            let (s, c) = th.sin_cos();
            gamma.push([center[0] + radius * c, center[1] + radius * s]);
            tangent.push([-s, c]);
        }
        Ok(Self::from_parts(
            gamma,
            tangent,
            vec![radius.recip(); n],
            two_pi * radius,
            true,
            T::zero(),
        ))
    }

    /// Counterclockwise ellipse with semi-axes `a` (along x) and `b` (along y),
    /// starting at `(a, 0)`.
    pub fn ellipse(a: T, b: T, n: usize) -> Result<Self> {
        Self::ellipse_at([T::zero(), T::zero()], a, b, n)
    }

    pub fn ellipse_at(center: [T; 2], a: T, b: T, n: usize) -> Result<Self> {
        if !(a > T::zero() && b > T::zero()) {
            return Err(GeoError::Parameter(format!(
                "ellipse semi-axes must be positive, got ({}, {})",
                to_f64(a),
                to_f64(b)
            )));
        }
        Self::from_parametrization(n, move |t| {
            let (s, c) = t.sin_cos();
            (
                [center[0] + a * c, center[1] + b * s],
                [-a * s, b * c],
                [-a * c, -b * s],
            )
        })
    }

    /// Resamples a smooth `2π`-periodic parametrization at uniform arc length.
    ///
    /// `eval(t)` returns position, first and second derivative. Arc length is
    /// the antiderivative of the Fourier series of the speed; the arc-length
    /// parameters are found by Newton iteration.
    pub fn from_parametrization(
        n: usize,
        eval: impl Fn(T) -> ([T; 2], [T; 2], [T; 2]),
    ) -> Result<Self> {
        check_count(n)?;
        let two_pi = T::PI() + T::PI();
        let m = SPEED_SAMPLES;
        let speed: Vec<T> = (0..m)
            .map(|j| {
                let (_, d, _) = eval(two_pi * count::<T>(j) / count::<T>(m));
                dot(d, d).sqrt()
            })
            .collect();
        if speed.iter().any(|s| !(*s > T::zero()) || !s.is_finite()) {
            return Err(GeoError::Parameter(
                "parametrization has vanishing or non-finite speed".into(),
            ));
        }
        let mean = speed.iter().copied().sum::<T>() / count(m);
        let two_over_m = lit::<T>(2.0) / count(m);
        let mut modes: Vec<(T, T)> = Vec::with_capacity(m / 2);
        for k in 1..m / 2 {
            let (mut a, mut b) = (T::zero(), T::zero());
            for (j, &s) in speed.iter().enumerate() {
                let ang = two_pi * count::<T>((k * j) % m) / count::<T>(m);
                let (sn, cs) = ang.sin_cos();
                a += s * cs;
                b += s * sn;
            }
            modes.push((a * two_over_m, b * two_over_m));
        }
        let floor = mean * lit(1e-17);
        let tail = modes
            .iter()
            .rposition(|(a, b)| a.abs() > floor || b.abs() > floor)
            .map_or(0, |p| p + 1);
        if tail + 1 >= m / 2 {
            let (a, b) = modes[m / 2 - 2];
            if a.abs().max(b.abs()) > mean * lit(1e-12) {
                return Err(GeoError::Parameter(
                    "parametrization speed is not resolved by its Fourier expansion".into(),
                ));
            }
        }
        modes.truncate(tail);
        let arc = |t: T| {
            let mut s = mean * t;
            for (idx, &(a, b)) in modes.iter().enumerate() {
                let k = count::<T>(idx + 1);
                let (sn, cs) = (k * t).sin_cos();
                s += (a * sn + b * (T::one() - cs)) / k;
            }
            s
        };
        let length = mean * two_pi;
        let mut gamma = Vec::with_capacity(n);
        let mut tangent = Vec::with_capacity(n);
        let mut curvature = Vec::with_capacity(n);
        for k in 0..n {
            let target = length * count::<T>(k) / count::<T>(n);
            let mut t = two_pi * count::<T>(k) / count::<T>(n);
            for _ in 0..60 {
                let (_, d, _) = eval(t);
                let step = (arc(t) - target) / dot(d, d).sqrt();
                t -= step;
                if step.abs() <= T::epsilon() * lit(4.0) * (T::one() + t.abs()) {
                    break;
                }
            }
            let (p, d, dd) = eval(t);
            let sp = dot(d, d).sqrt();
            gamma.push(p);
            tangent.push([d[0] / sp, d[1] / sp]);
            curvature.push((d[0] * dd[1] - d[1] * dd[0]) / (sp * sp * sp));
        }
        Ok(Self::from_parts(gamma, tangent, curvature, length, true, T::zero()))
    }

    /// Resamples a closed polygonal sample set to `n` points at uniform arc
    /// length of its periodic cubic spline interpolant.
    ///
    /// A trailing point equal to the first is dropped. Tangent and curvature
    /// of the result are spectral derivatives of the resampled positions.
    pub fn from_samples(points: &[[T; 2]], n: usize) -> Result<Self> {
        check_count(n)?;
        let mut pts = points.to_vec();
        if pts.len() > 1 {
            let (f, l) = (pts[0], pts[pts.len() - 1]);
            if (f[0] - l[0]).abs() + (f[1] - l[1]).abs() <= T::epsilon() {
                pts.pop();
            }
        }
        if pts.len() < 4 {
            return Err(GeoError::Parameter(
                "need at least four distinct samples to interpolate a closed curve".into(),
            ));
        }
        if pts.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
            return Err(GeoError::Malformed("curve samples must be finite".into()));
        }
        let spline = PeriodicSpline::new(&pts);
        let (gamma, length) = spline.resample(n)?;
        Self::closed_from_positions(gamma, length)
    }

    /// Builds tangent and curvature of a closed, arc-length sampled curve by
    /// spectral differentiation.
    pub(crate) fn closed_from_positions(gamma: Vec<[T; 2]>, length: T) -> Result<Self> {
        let xs: Vec<T> = gamma.iter().map(|p| p[0]).collect();
        let ys: Vec<T> = gamma.iter().map(|p| p[1]).collect();
        let (dx, dy) = (
            periodic_derivative(&xs, length, 1),
            periodic_derivative(&ys, length, 1),
        );
        let (ddx, ddy) = (
            periodic_derivative(&xs, length, 2),
            periodic_derivative(&ys, length, 2),
        );
        let mut tangent = Vec::with_capacity(gamma.len());
        let mut curvature = Vec::with_capacity(gamma.len());
        for k in 0..gamma.len() {
            let sp = (dx[k] * dx[k] + dy[k] * dy[k]).sqrt();
            if !(sp > T::zero()) {
                return Err(GeoError::Parameter("curve has a stationary point".into()));
            }
            tangent.push([dx[k] / sp, dy[k] / sp]);
            curvature.push((dx[k] * ddy[k] - dy[k] * ddx[k]) / (sp * sp * sp));
        }
        Ok(Self::from_parts(gamma, tangent, curvature, length, true, T::zero()))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.gamma.len()
    }

    #[inline]
    pub fn length(&self) -> T {
        self.length
    }

    pub fn gamma(&self) -> &[[T; 2]] {
        &self.gamma
    }

    pub fn tangent(&self) -> &[[T; 2]] {
        &self.tangent
    }

    pub fn curvature(&self) -> &[T] {
        &self.curvature
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Position plus tangent mismatch between the two ends of the sampled arc
    /// (zero by construction for analytic closed curves).
    pub fn closure_gap(&self) -> T {
        self.closure_gap
    }

    /// Arc-length spacing between consecutive samples.
    pub fn spacing(&self) -> T {
        if self.closed {
            self.length / count(self.n())
        } else {
            self.length / count(self.n() - 1)
        }
    }

    pub fn min_radius(&self) -> T {
        self.gamma
            .iter()
            .map(|p| dot(*p, *p).sqrt())
            .fold(T::infinity(), T::min)
    }

    /// Largest deviation of `|T|` from one.
    pub fn unit_tangent_defect(&self) -> T {
        self.tangent
            .iter()
            .map(|t| (dot(*t, *t).sqrt() - T::one()).abs())
            .fold(T::zero(), T::max)
    }

    /// Largest gap between the stored tangent and the spectral arc-length
    /// derivative of the positions.
    pub fn tangent_consistency(&self) -> Result<T> {
        if !self.closed {
            return Err(GeoError::OpenCurve {
                gap: to_f64(self.closure_gap),
            });
        }
        let xs: Vec<T> = self.gamma.iter().map(|p| p[0]).collect();
        let ys: Vec<T> = self.gamma.iter().map(|p| p[1]).collect();
        let dx = periodic_derivative(&xs, self.length, 1);
        let dy = periodic_derivative(&ys, self.length, 1);
        Ok((0..self.n())
            .map(|k| {
                let t = self.tangent[k];
                (dx[k] - t[0]).abs().max((dy[k] - t[1]).abs())
            })
            .fold(T::zero(), T::max))
    }

    /// Curvature recomputed from spectral second derivatives of the
    /// positions, `k = ⟨γ'', J T⟩`.
    pub fn spectral_curvature(&self) -> Result<Vec<T>> {
        if !self.closed {
            return Err(GeoError::OpenCurve {
                gap: to_f64(self.closure_gap),
            });
        }
        let xs: Vec<T> = self.gamma.iter().map(|p| p[0]).collect();
        let ys: Vec<T> = self.gamma.iter().map(|p| p[1]).collect();
        let ddx = periodic_derivative(&xs, self.length, 2);
        let ddy = periodic_derivative(&ys, self.length, 2);
        Ok((0..self.n())
            .map(|k| dot([ddx[k], ddy[k]], rot90(self.tangent[k])))
            .collect())
    }

    /// Sup-norm of `k + ⟨γ, JT⟩ − λ` with spectrally recomputed curvature.
    pub fn lambda_residual(&self, lambda: T) -> Result<T> {
        let k = self.spectral_curvature()?;
        Ok((0..self.n())
            .map(|i| (k[i] + dot(self.gamma[i], rot90(self.tangent[i])) - lambda).abs())
            .fold(T::zero(), T::max))
    }

    /// Largest variation `max k − min k` of the stored curvature.
    pub fn curvature_variation(&self) -> T {
        let lo = self.curvature.iter().copied().fold(T::infinity(), T::min);
        let hi = self.curvature.iter().copied().fold(T::neg_infinity(), T::max);
        hi - lo
    }
}

fn check_count(n: usize) -> Result<()> {
    if n < crate::grid::MIN_SAMPLES {
        return Err(GeoError::Parameter(format!(
            "curves need at least {} samples, got {n}",
            crate::grid::MIN_SAMPLES
        )));
    }
    Ok(())
}

/// Periodic cubic spline through points at unit parameter spacing.
struct PeriodicSpline<T> {
    pts: Vec<[T; 2]>,
    second: Vec<[T; 2]>,
}

const GAUSS_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

impl<T: Real> PeriodicSpline<T> {
    fn new(pts: &[[T; 2]]) -> Self {
        let m = pts.len();
        let six = lit::<T>(6.0);
        let four = lit::<T>(4.0);
        let rhs: Vec<[T; 2]> = (0..m)
            .map(|j| {
                let (a, b, c) = (pts[(j + m - 1) % m], pts[j], pts[(j + 1) % m]);
                [
                    six * (c[0] - b[0] - b[0] + a[0]),
                    six * (c[1] - b[1] - b[1] + a[1]),
                ]
            })
            .collect();
        // Cyclic, strictly diagonally dominant: Gauss-Seidel converges by a
        // factor of at least two per sweep.
        let mut second = vec![[T::zero(); 2]; m];
        let scale = rhs
            .iter()
            .map(|r| r[0].abs().max(r[1].abs()))
            .fold(T::zero(), T::max)
            .max(T::min_positive_value());
        for _ in 0..400 {
            let mut change = T::zero();
            for j in 0..m {
                let (l, r) = (second[(j + m - 1) % m], second[(j + 1) % m]);
                for c in 0..2 {
                    let new = (rhs[j][c] - l[c] - r[c]) / four;
                    change = change.max((new - second[j][c]).abs());
                    second[j][c] = new;
                }
            }
            if change <= T::epsilon() * scale {
                break;
            }
        }
        Self {
            pts: pts.to_vec(),
            second,
        }
    }

    fn segment(&self, j: usize) -> ([T; 2], [T; 2], [T; 2], [T; 2]) {
        let m = self.pts.len();
        (
            self.pts[j],
            self.pts[(j + 1) % m],
            self.second[j],
            self.second[(j + 1) % m],
        )
    }

    fn eval(&self, j: usize, t: T) -> ([T; 2], [T; 2]) {
        let (p0, p1, m0, m1) = self.segment(j);
        let six = lit::<T>(6.0);
        let three = lit::<T>(3.0);
        let s = T::one() - t;
        let a = (s * s * s - s) / six;
        let b = (t * t * t - t) / six;
        let da = -(three * s * s - T::one()) / six;
        let db = (three * t * t - T::one()) / six;
        let mut p = [T::zero(); 2];
        let mut d = [T::zero(); 2];
        for c in 0..2 {
            p[c] = s * p0[c] + t * p1[c] + a * m0[c] + b * m1[c];
            d[c] = p1[c] - p0[c] + da * m0[c] + db * m1[c];
        }
        (p, d)
    }

    fn speed(&self, j: usize, t: T) -> T {
        let (_, d) = self.eval(j, t);
        dot(d, d).sqrt()
    }

    /// Arc length of segment `j` from 0 to `t`.
    fn partial_length(&self, j: usize, t: T) -> T {
        let half = t / lit(2.0);
        GAUSS_NODES
            .iter()
            .zip(GAUSS_WEIGHTS)
            .map(|(&x, w)| lit::<T>(w) * self.speed(j, half * (lit::<T>(x) + T::one())))
            .sum::<T>()
            * half
    }

    fn resample(&self, n: usize) -> Result<(Vec<[T; 2]>, T)> {
        let m = self.pts.len();
        // Sub-divide each segment so the composite Gauss rule resolves the
        // quartic speed.
        let seg_len: Vec<T> = (0..m)
            .map(|j| {
                let quarter = lit::<T>(0.25);
                (0..4)
                    .map(|k| {
                        let t0 = quarter * count::<T>(k);
                        self.partial_length(j, t0 + quarter) - self.partial_length(j, t0)
                    })
                    .sum::<T>()
            })
            .collect();
        let mut cumulative = Vec::with_capacity(m + 1);
        cumulative.push(T::zero());
        for l in &seg_len {
            let last = *cumulative.last().unwrap();
            cumulative.push(last + *l);
        }
        let length = cumulative[m];
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let target = length * count::<T>(k) / count::<T>(n);
            let j = match cumulative.binary_search_by(|c| c.partial_cmp(&target).unwrap()) {
                Ok(j) => j.min(m - 1),
                Err(j) => j.saturating_sub(1).min(m - 1),
            };
            let local = target - cumulative[j];
            let mut t = if seg_len[j] > T::zero() {
                local / seg_len[j]
            } else {
                T::zero()
            };
            let mut converged = false;
            for _ in 0..50 {
                let err = self.partial_length(j, t) - local;
                let step = err / self.speed(j, t);
                t -= step;
                if step.abs() <= lit(1e-14) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(GeoError::Unstable(
                    "arc-length inversion did not converge".into(),
                ));
            }
            out.push(self.eval(j, t).0);
        }
        Ok((out, length))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circle_is_unit_speed_and_consistent() {
        let c = PlaneCurve::circle(2.0f64, 64).unwrap();
        assert!((c.length() - 4.0 * PI).abs() < 1e-14);
        assert!(c.unit_tangent_defect() < 1e-14);
        assert!(c.tangent_consistency().unwrap() < 1e-12);
        assert!(c.lambda_residual(0.5 - 2.0).unwrap() < 1e-10);
    }

    #[test]
    fn ellipse_is_arc_length_sampled() {
        let c = PlaneCurve::ellipse(1.0f64, 1.2, 64).unwrap();
        assert!(c.unit_tangent_defect() < 1e-12);
        assert!(c.tangent_consistency().unwrap() < 1e-8);
        // Chords between neighbours are all equal to leading order.
        let h = c.spacing();
        for k in 0..c.n() {
            let (a, b) = (c.gamma()[k], c.gamma()[(k + 1) % c.n()]);
            let chord = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
            assert!((chord - h).abs() < h.powi(3));
        }
        let spec_k = c.spectral_curvature().unwrap();
        for (a, b) in spec_k.iter().zip(c.curvature()) {
            assert!((a - b).abs() < 1e-8);
        }
        // Independent perimeter: trapezoid rule on the raw speed.
        let m = 4000;
        let perimeter: f64 = (0..m)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / m as f64;
                (t.sin().powi(2) + 1.44 * t.cos().powi(2)).sqrt()
            })
            .sum::<f64>()
            * 2.0
            * PI
            / m as f64;
        assert!((c.length() - perimeter).abs() < 1e-12);
        assert!((c.length() - 6.925_791_195_809_681).abs() < 1e-12);
    }

    #[test]
    fn sampled_ellipse_matches_spectral_resampling() {
        let m = 2000;
        let pts: Vec<[f64; 2]> = (0..m)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / m as f64;
                [t.cos(), 1.2 * t.sin()]
            })
            .collect();
        let sampled = PlaneCurve::from_samples(&pts, 32).unwrap();
        let exact = PlaneCurve::ellipse(1.0, 1.2, 32).unwrap();
        assert!((sampled.length() - exact.length()).abs() < 1e-9);
        for (a, b) in sampled.gamma().iter().zip(exact.gamma()) {
            assert!((a[0] - b[0]).abs() < 1e-8 && (a[1] - b[1]).abs() < 1e-8);
        }
        assert!(sampled.unit_tangent_defect() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PlaneCurve::circle(0.0, 16).is_err());
        assert!(PlaneCurve::circle(1.0, 4).is_err());
        assert!(PlaneCurve::ellipse(-1.0, 1.0, 16).is_err());
        assert!(PlaneCurve::<f64>::from_samples(&[[0.0, 0.0], [1.0, 0.0]], 16).is_err());
    }
}

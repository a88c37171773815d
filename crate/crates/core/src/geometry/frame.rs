use super::{Cubic, GeometryBundle};
use crate::error::{GeoError, Result};
use crate::grid::Field;
use crate::scalar::{count, lit, to_f64, Real};

/// Flatness required before diagonalizing.
pub const FLATNESS_TOL: f64 = 1e-6;

/// Rotation of the reference orthonormal frame that diagonalizes the cubic
/// form, with the achieved off-diagonal residual.
#[derive(Debug, Clone)]
pub struct DiagonalFrame<T> {
    /// Angle in `[0, π/2)` measured from the reference frame.
    pub theta: Field<T>,
    /// `sup max(|h̃₁₂^{1*}|, |h̃₁₂^{2*}|)` in the rotated frame.
    pub residual: T,
}

#[inline]
fn eval<T: Real>(c: &Cubic<T>, x: [T; 2], y: [T; 2], z: [T; 2]) -> T {
    let mut s = T::zero();
    for a in 0..2 {
        for b in 0..2 {
            for d in 0..2 {
                s += c[a][b][d] * x[a] * y[b] * z[d];
            }
        }
    }
    s
}

#[inline]
fn rotate<T: Real>(e1: [T; 2], e2: [T; 2], angle: T) -> ([T; 2], [T; 2]) {
    let (s, c) = angle.sin_cos();
    (
        [c * e1[0] + s * e2[0], c * e1[1] + s * e2[1]],
        [c * e2[0] - s * e1[0], c * e2[1] - s * e1[1]],
    )
}

/// Finds, pointwise, the frame rotation in which the off-diagonal cubic
/// components vanish.
///
/// The reference frame is Gram–Schmidt on `(∂_u, ∂_v)`, rotated by
/// `frame_offset`. Writing `f(φ) = C(v_φ, v_φ, v_φ)` for the unit vector at
/// angle `φ`, a diagonal cubic `α v*³ + δ w*³` in the frame at angle `φ₀` has
/// first and third harmonics whose phases add up to `−4φ₀`. The harmonics
/// come from an exact eight-point DFT of `f`, and the smallest nonnegative
/// root modulo `π/2` is returned.
pub fn diagonalize_frame<T: Real>(b: &GeometryBundle<T>, frame_offset: T) -> Result<DiagonalFrame<T>> {
    let k_max = b.metric.k_intrinsic.max_abs();
    if !(k_max <= lit(FLATNESS_TOL)) {
        return Err(GeoError::Hypothesis(format!(
            "frame diagonalization needs a flat surface, max|K| = {:e}",
            to_f64(k_max)
        )));
    }
    let spec = *b.spec();
    let quarter = T::FRAC_PI_2();
    let two_pi = T::PI() + T::PI();
    let mut residual = T::zero();
    let mut theta = vec![T::zero(); spec.len()];
    for (i, th) in theta.iter_mut().enumerate() {
        let g = b.metric.g_at(i);
        let det = b.metric.det.get(i, 0);
        let s11 = g[0][0].sqrt();
        let e1 = [s11.recip(), T::zero()];
        let e2 = [-g[0][1] / (s11 * det.sqrt()), s11 / det.sqrt()];
        let (f1, f2) = rotate(e1, e2, frame_offset);
        let c = b.cubic_at(i);
        let (mut h1, mut h3) = ((T::zero(), T::zero()), (T::zero(), T::zero()));
        for j in 0..8 {
            let phi = two_pi * count::<T>(j) / lit(8.0);
            let (v, _) = rotate(f1, f2, phi);
            let f = eval(&c, v, v, v);
            let (s1, c1) = phi.sin_cos();
            let (s3, c3) = (phi * lit(3.0)).sin_cos();
            h1 = (h1.0 + f * c1, h1.1 - f * s1);
            h3 = (h3.0 + f * c3, h3.1 - f * s3);
        }
        let scale = T::one() + c.iter().flatten().flatten().fold(T::zero(), |m, x| m.max(x.abs()));
        let tiny = lit::<T>(1e-13) * scale;
        let arg = |h: (T, T)| {
            if h.0.hypot(h.1) <= tiny {
                T::zero()
            } else {
                h.1.atan2(h.0)
            }
        };
        let mut angle = -(arg(h1) + arg(h3)) / lit(4.0);
        angle = angle % quarter;
        if angle < T::zero() {
            angle += quarter;
        }
        if quarter - angle <= lit::<T>(1e-9) {
            angle = T::zero();
        }
        *th = angle;
        let (v, w) = rotate(f1, f2, angle);
        residual = residual
            .max(eval(&c, v, v, w).abs())
            .max(eval(&c, v, w, w).abs());
    }
    Ok(DiagonalFrame {
        theta: Field::new(spec, 1, theta)?,
        residual,
    })
}

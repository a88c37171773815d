use std::fmt;
use std::str::FromStr;

use crate::curves::plane::{rot90, PlaneCurve};
use crate::error::{GeoError, Result};
use crate::scalar::{count, lit, to_f64, wrap_angle, Real};

/// Largest admissible integration step.
pub const MAX_STEP: f64 = 1e-2;

/// Tolerated drift of `|T|` from one before a refinement is requested.
const UNIT_DRIFT: f64 = 1e-9;

/// Integration length after which a shot that never reaches its target ray
/// is abandoned.
const MAX_SHOT_LENGTH: f64 = 400.0;

/// `λ = 1/r − r`: the centred circle of radius `r` satisfies `k + ⟨γ, JT⟩ = λ`.
pub fn circle_lambda<T: Real>(r: T) -> Result<T> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(GeoError::Parameter(format!(
            "circle radius must be positive, got {}",
            to_f64(r)
        )));
    }
    Ok(r.recip() - r)
}

/// Positive root of `r² + λr − 1 = 0`, the inverse of [`circle_lambda`].
pub fn circle_radius<T: Real>(lambda: T) -> T {
    let two = lit::<T>(2.0);
    let disc = (lambda * lambda + lit(4.0)).sqrt();
    if lambda > T::zero() {
        two / (lambda + disc)
    } else {
        (disc - lambda) / two
    }
}

/// State `(x, y, ϑ)` with `T = (cos ϑ, sin ϑ)`.
type State<T> = [T; 3];

/// Right-hand side of `γ' = T`, `ϑ' = k = λ − ⟨γ, JT⟩`.
#[inline]
fn rhs<T: Real>(lambda: T, s: State<T>) -> State<T> {
    let (sn, cs) = s[2].sin_cos();
    [cs, sn, lambda + s[0] * sn - s[1] * cs]
}

#[inline]
fn rk4<T: Real>(lambda: T, s: State<T>, h: T) -> State<T> {
    let half = h / lit(2.0);
    let add = |a: State<T>, b: State<T>, t: T| [a[0] + t * b[0], a[1] + t * b[1], a[2] + t * b[2]];
    let k1 = rhs(lambda, s);
    let k2 = rhs(lambda, add(s, k1, half));
    let k3 = rhs(lambda, add(s, k2, half));
    let k4 = rhs(lambda, add(s, k3, h));
    let sixth = h / lit(6.0);
    let two = lit::<T>(2.0);
    [
        s[0] + sixth * (k1[0] + two * k2[0] + two * k3[0] + k4[0]),
        s[1] + sixth * (k1[1] + two * k2[1] + two * k3[1] + k4[1]),
        s[2] + sixth * (k1[2] + two * k2[2] + two * k3[2] + k4[2]),
    ]
}

fn tangent_of<T: Real>(s: State<T>) -> [T; 2] {
    let (sn, cs) = s[2].sin_cos();
    [cs, sn]
}

fn curvature_at<T: Real>(lambda: T, gamma: [T; 2], tangent: [T; 2]) -> T {
    let n = rot90(tangent);
    lambda - (gamma[0] * n[0] + gamma[1] * n[1])
}

fn check_step<T: Real>(ds: T) -> Result<()> {
    if !(ds > T::zero()) || ds > lit(MAX_STEP * (1.0 + 1e-12)) {
        return Err(GeoError::Parameter(format!(
            "step must lie in (0, {MAX_STEP}], got {}",
            to_f64(ds)
        )));
    }
    Ok(())
}

/// Integrates the λ-curve equation `k + ⟨γ, JT⟩ = λ` with fixed-step RK4.
///
/// The unit tangent is carried as an angle, so `|T| = 1` holds to rounding.
/// Steps are shrunk uniformly so that an integer number of them covers
/// `[0, s_max]`. The returned curve is open and stores every step.
pub fn integrate_lambda_curve<T: Real>(
    lambda: T,
    gamma0: [T; 2],
    t0: [T; 2],
    s_max: T,
    ds: T,
) -> Result<PlaneCurve<T>> {
    check_step(ds)?;
    let norm = (t0[0] * t0[0] + t0[1] * t0[1]).sqrt();
    if (norm - T::one()).abs() > lit(1e-12) {
        return Err(GeoError::Parameter(format!(
            "initial tangent must be a unit vector, |T0| = {}",
            to_f64(norm)
        )));
    }
    if !(s_max > T::zero()) || !s_max.is_finite() || !lambda.is_finite() {
        return Err(GeoError::Parameter(
            "integration length and λ must be finite, length positive".into(),
        ));
    }
    let steps = (s_max / ds).ceil().to_usize().unwrap_or(usize::MAX).max(1);
    let h = s_max / count(steps);
    let mut state = [gamma0[0], gamma0[1], t0[1].atan2(t0[0])];
    let mut gamma = Vec::with_capacity(steps + 1);
    let mut tangent = Vec::with_capacity(steps + 1);
    let mut curvature = Vec::with_capacity(steps + 1);
    let mut record = |s: State<T>| -> Result<()> {
        let (p, t) = ([s[0], s[1]], tangent_of(s));
        let drift = ((t[0] * t[0] + t[1] * t[1]).sqrt() - T::one()).abs();
        if drift > lit(UNIT_DRIFT) || !(p[0].is_finite() && p[1].is_finite()) {
            return Err(GeoError::Unstable(format!(
                "unit tangent drifted by {:e}",
                to_f64(drift)
            )));
        }
        gamma.push(p);
        tangent.push(t);
        curvature.push(curvature_at(lambda, p, t));
        Ok(())
    };
    record(state)?;
    for _ in 0..steps {
        state = rk4(lambda, state, h);
        record(state)?;
    }
    let gap = end_gap(&gamma, &tangent);
    Ok(PlaneCurve::from_parts(gamma, tangent, curvature, s_max, false, gap))
}

fn end_gap<T: Real>(gamma: &[[T; 2]], tangent: &[[T; 2]]) -> T {
    let (a, b) = (gamma[0], gamma[gamma.len() - 1]);
    let (s, e) = (tangent[0], tangent[tangent.len() - 1]);
    let pos = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let tan = ((s[0] - e[0]).powi(2) + (s[1] - e[1]).powi(2)).sqrt();
    pos.max(tan)
}

/// Rotation number `p/q` of a closed curve, in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rotation {
    p: u32,
    q: u32,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rotation {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(GeoError::Parameter(format!(
                "rotation {p}/{q} must have positive numerator and denominator"
            )));
        }
        if gcd(p, q) != 1 {
            return Err(GeoError::Parameter(format!(
                "rotation {p}/{q} is not in lowest terms"
            )));
        }
        Ok(Self { p, q })
    }

    pub fn p(self) -> u32 {
        self.p
    }

    pub fn q(self) -> u32 {
        self.q
    }

    /// Polar angle swept by one symmetric arc, `π p/q`.
    pub fn half_angle<T: Real>(self) -> T {
        T::PI() * count::<T>(self.p as usize) / count::<T>(self.q as usize)
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Rotation {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        let (p, q) = s
            .split_once('/')
            .ok_or_else(|| GeoError::Parameter(format!("rotation must look like p/q, got {s:?}")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| GeoError::Parameter(format!("bad rotation component {t:?}")))
        };
        Self::new(parse(p)?, parse(q)?)
    }
}

/// Outcome class of a shooting run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShootStatus {
    /// A root was found and the assembled curve closes within tolerance.
    Found,
    /// The shooting function has no sign change in the bracket.
    NotFound,
    /// A root was found but the assembled curve misses closure.
    NotClosed,
}

impl ShootStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Found => "found",
            Self::NotFound => "not-found",
            Self::NotClosed => "not-closed",
        }
    }
}

/// Knobs for [`shoot_closed`].
#[derive(Debug, Clone, Copy)]
pub struct ShootOptions<T> {
    /// Samples of the assembled closed curve.
    pub samples: usize,
    /// Upper bound on the RK4 step.
    pub ds: T,
    /// Sub-intervals of the bracket probed for a sign change.
    pub probes: usize,
    /// Position and tangent gap accepted as closed.
    pub closure_tol: T,
}

impl<T: Real> Default for ShootOptions<T> {
    fn default() -> Self {
        Self {
            samples: 128,
            ds: lit(2e-3),
            probes: 24,
            closure_tol: lit(1e-8),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LambdaShoot<T> {
    pub lambda: T,
    pub rotation: Rotation,
    pub bracket: (T, T),
    pub status: ShootStatus,
    /// Initial distance `r₀` of the root, when one was bracketed.
    pub r0: Option<T>,
    pub curve: Option<PlaneCurve<T>>,
    pub closure_residual: Option<T>,
    /// Every root of the shooting function located in the bracket.
    pub roots: Vec<T>,
}

/// Arc from `(r0, 0)` with `T = (0, 1)` up to the first time its unwrapped
/// polar angle reaches `target`. Returns the arc length and the state there.
fn shoot_arc<T: Real>(lambda: T, r0: T, target: T, ds: T) -> Option<(T, State<T>)> {
    let mut s = [r0, T::zero(), T::FRAC_PI_2()];
    let mut angle = T::zero();
    let mut travelled = T::zero();
    let limit = lit::<T>(MAX_SHOT_LENGTH);
    let tiny = lit::<T>(1e-9);
    while travelled < limit {
        let next = rk4(lambda, s, ds);
        let r = (next[0] * next[0] + next[1] * next[1]).sqrt();
        if !(r > tiny) || !next[2].is_finite() {
            return None;
        }
        let next_angle = angle + wrap_angle(next[1].atan2(next[0]) - s[1].atan2(s[0]));
        if next_angle >= target {
            // Bisect the partial step so the crossing is resolved to rounding.
            let (mut lo, mut hi) = (T::zero(), ds);
            for _ in 0..80 {
                let mid = (lo + hi) / lit(2.0);
                let m = rk4(lambda, s, mid);
                let a = angle + wrap_angle(m[1].atan2(m[0]) - s[1].atan2(s[0]));
                if a >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo <= T::epsilon() * ds {
                    break;
                }
            }
            let h = (lo + hi) / lit(2.0);
            return Some((travelled + h, rk4(lambda, s, h)));
        }
        s = next;
        angle = next_angle;
        travelled += ds;
    }
    None
}

/// Radial velocity `⟨γ, T⟩/|γ|` where the arc meets the target ray; zero
/// exactly when the crossing is perpendicular.
fn radial_velocity<T: Real>(lambda: T, r0: T, target: T, ds: T) -> Option<(T, T)> {
    let (len, s) = shoot_arc(lambda, r0, target, ds)?;
    let t = tangent_of(s);
    let r = (s[0] * s[0] + s[1] * s[1]).sqrt();
    Some(((s[0] * t[0] + s[1] * t[1]) / r, len))
}

/// Searches `[r0_lo, r0_hi]` for a closed λ-curve with rotation `p/q`.
///
/// A solution started perpendicular to a ray is symmetric under reflection
/// in that ray. If it meets the ray at polar angle `πp/q` perpendicularly as
/// well, the two reflections compose to a rotation by `2πp/q` and the curve
/// closes after `2q` arcs. The shooter bisects every sign change of the
/// radial velocity at that ray found by the probes, integrates each full
/// closed length and measures the actual gap. The shortest closed candidate
/// wins, so a bracket containing a circle returns the circle rather than a
/// longer multiply-looping solution.
pub fn shoot_closed<T: Real>(
    lambda: T,
    rotation: Rotation,
    bracket: (T, T),
    options: ShootOptions<T>,
) -> Result<LambdaShoot<T>> {
    let (lo, hi) = bracket;
    if !(lo > T::zero() && hi > lo && hi.is_finite()) {
        return Err(GeoError::Parameter(format!(
            "bracket must satisfy 0 < lo < hi, got [{}, {}]",
            to_f64(lo),
            to_f64(hi)
        )));
    }
    if !lambda.is_finite() {
        return Err(GeoError::Parameter("λ must be finite".into()));
    }
    check_step(options.ds)?;
    if options.samples < crate::grid::MIN_SAMPLES || options.probes == 0 {
        return Err(GeoError::Parameter(
            "shooting needs at least 8 curve samples and one probe".into(),
        ));
    }
    let target = rotation.half_angle::<T>();
    let g = |r: T| radial_velocity(lambda, r, target, options.ds).map(|(v, _)| v);
    let not_found = LambdaShoot {
        lambda,
        rotation,
        bracket,
        status: ShootStatus::NotFound,
        r0: None,
        curve: None,
        closure_residual: None,
        roots: Vec::new(),
    };

    // Every probe interval with a sign change is a candidate.
    let mut intervals = Vec::new();
    let mut prev: Option<(T, T)> = None;
    for k in 0..=options.probes {
        let r = lo + (hi - lo) * count::<T>(k) / count::<T>(options.probes);
        let Some(v) = g(r) else {
            prev = None;
            continue;
        };
        if v == T::zero() {
            intervals.push((r, r));
            prev = None;
            continue;
        }
        if let Some((pr, pv)) = prev {
            if (pv < T::zero()) != (v < T::zero()) {
                intervals.push((pr, r));
            }
        }
        prev = Some((r, v));
    }

    let mut best: Option<LambdaShoot<T>> = None;
    let mut roots = Vec::new();
    for (a, b) in intervals {
        let Some(r0) = bisect(&g, a, b) else { continue };
        let Some((_, half_len)) = radial_velocity(lambda, r0, target, options.ds) else {
            continue;
        };
        roots.push(r0);
        let length = half_len * lit::<T>(2.0) * count::<T>(rotation.q as usize);
        let curve = assemble(lambda, r0, length, options)?;
        let residual = curve.closure_gap();
        let status = if residual <= options.closure_tol {
            ShootStatus::Found
        } else {
            ShootStatus::NotClosed
        };
        let better = match &best {
            None => true,
            Some(cur) => match (cur.status, status) {
                (ShootStatus::Found, ShootStatus::Found) => {
                    length < cur.curve.as_ref().map_or(T::infinity(), |c| c.length())
                }
                (ShootStatus::Found, _) => false,
                (_, ShootStatus::Found) => true,
                _ => false,
            },
        };
        if better {
            best = Some(LambdaShoot {
                status,
                r0: Some(r0),
                closure_residual: Some(residual),
                curve: Some(curve),
                roots: Vec::new(),
                ..not_found.clone()
            });
        }
    }
    Ok(match best {
        Some(shot) => LambdaShoot { roots, ..shot },
        None => not_found,
    })
}

/// Bisects a sign change of `g` on `[a, b]`.
fn bisect<T: Real>(g: &impl Fn(T) -> Option<T>, mut a: T, mut b: T) -> Option<T> {
    if a == b {
        return Some(a);
    }
    let mut ga = g(a)?;
    for _ in 0..200 {
        let m = (a + b) / lit(2.0);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m)?;
        if gm == T::zero() {
            return Some(m);
        }
        if (gm < T::zero()) == (ga < T::zero()) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    Some((a + b) / lit(2.0))
}

/// Integrates the full closed length from the shooting start and keeps every
/// `m`-th step so that exactly `samples` points remain.
fn assemble<T: Real>(lambda: T, r0: T, length: T, options: ShootOptions<T>) -> Result<PlaneCurve<T>> {
    let n = options.samples;
    let m = (length / (count::<T>(n) * options.ds))
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    let h = length / count(n * m);
    let mut s = [r0, T::zero(), T::FRAC_PI_2()];
    let start = s;
    let mut gamma = Vec::with_capacity(n);
    let mut tangent = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    for _ in 0..n {
        let (p, t) = ([s[0], s[1]], tangent_of(s));
        gamma.push(p);
        tangent.push(t);
        curvature.push(curvature_at(lambda, p, t));
        for _ in 0..m {
            s = rk4(lambda, s, h);
        }
        if !(s[0].is_finite() && s[1].is_finite() && s[2].is_finite()) {
            return Err(GeoError::Unstable("closed-curve integration diverged".into()));
        }
    }
    let pos = ((s[0] - start[0]).powi(2) + (s[1] - start[1]).powi(2)).sqrt();
    let tan = lit::<T>(2.0) * (wrap_angle(s[2] - start[2]) / lit(2.0)).sin().abs();
    Ok(PlaneCurve::from_parts(
        gamma,
        tangent,
        curvature,
        length,
        true,
        pos.max(tan),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_lambda_values() {
        assert_eq!(circle_lambda(1.0).unwrap(), 0.0);
        assert_eq!(circle_lambda(2.0).unwrap(), -1.5);
        assert!(circle_lambda(0.0).is_err());
        for r in [0.1f64, 0.5, 1.0, 3.0, 40.0] {
            assert!((circle_radius(circle_lambda(r).unwrap()) - r).abs() < 1e-12 * r.max(1.0));
        }
    }

    #[test]
    fn rotation_parsing() {
        let r: Rotation = "2/3".parse().unwrap();
        assert_eq!((r.p(), r.q()), (2, 3));
        assert_eq!(r.to_string(), "2/3");
        assert!("2/4".parse::<Rotation>().is_err());
        assert!("0/1".parse::<Rotation>().is_err());
        assert!("3".parse::<Rotation>().is_err());
    }

    #[test]
    fn unit_circle_is_reproduced() {
        let c = integrate_lambda_curve(0.0f64, [1.0, 0.0], [0.0, 1.0], 2.0 * std::f64::consts::PI, 1e-2)
            .unwrap();
        for p in c.gamma() {
            assert!(((p[0] * p[0] + p[1] * p[1]).sqrt() - 1.0).abs() < 1e-8);
        }
        assert!(c.closure_gap() < 1e-8);
        assert!(!c.is_closed());
    }

    #[test]
    fn integrator_rejects_bad_input() {
        assert!(integrate_lambda_curve(0.0f64, [1.0, 0.0], [0.0, 1.1], 1.0, 1e-2).is_err());
        assert!(integrate_lambda_curve(0.0f64, [1.0, 0.0], [0.0, 1.0], 1.0, 0.1).is_err());
        assert!(integrate_lambda_curve(0.0f64, [1.0, 0.0], [0.0, 1.0], -1.0, 1e-2).is_err());
    }

    #[test]
    fn shooter_finds_unit_circle() {
        let shot = shoot_closed(0.0f64, Rotation::new(1, 1).unwrap(), (0.5, 1.5), ShootOptions::default())
            .unwrap();
        assert_eq!(shot.status, ShootStatus::Found);
        assert!((shot.r0.unwrap() - 1.0).abs() < 1e-8);
        assert!(shot.closure_residual.unwrap() <= 1e-8);
        let c = shot.curve.unwrap();
        assert!((c.length() - 2.0 * std::f64::consts::PI).abs() < 1e-7);
    }

    #[test]
    fn bracket_without_root_is_not_found() {
        let shot = shoot_closed(0.0f64, Rotation::new(1, 1).unwrap(), (1.2, 1.4), ShootOptions::default())
            .unwrap();
        assert_eq!(shot.status, ShootStatus::NotFound);
        assert!(shot.curve.is_none());
    }
}

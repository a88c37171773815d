//! Plane curves, λ-curves and the product construction of ξ-surfaces.
//!
//! A λ-curve is a unit-speed plane curve with `k + ⟨γ, JT⟩ = λ`, where
//! `k = ⟨T', JT⟩` and `J` is the counterclockwise quarter turn. Centred
//! circles of radius `r` have `λ = 1/r − r`.

mod lambda;
mod plane;
mod product;

pub use lambda::{
    circle_lambda, circle_radius, integrate_lambda_curve, shoot_closed, LambdaShoot, Rotation,
    ShootOptions, ShootStatus, MAX_STEP,
};
pub use plane::PlaneCurve;
pub use product::{product_xi, Certification, CertifiedSurface, CERTIFICATION_TOL};

//! Spectral differential geometry of immersed Lagrangian tori in ℂ².
//!
//! Surfaces are sampled on a uniform doubly periodic grid and differentiated
//! spectrally. From the samples the crate computes the metric, connection,
//! second fundamental form (as the cubic form `C`), mean curvature, Maslov
//! data and the drift Laplacian, then classifies ξ-submanifolds
//! (`H + x^⊥ = ξ` with `ξ` parallel) and checks the structure equations and
//! integral identities that hold on them.
//!
//! Everything is generic over the scalar type through [`scalar::Real`]; the
//! aliases below fix it to `f64` or `f32`.
//!
//! ```
//! use xigeo_core::{geometry::GeometryBundle, grid::GridSpec, surfaces, tolerance::Tolerances, xi};
//!
//! let spec = GridSpec::<f64>::torus(32, 32).unwrap();
//! let m = surfaces::make_product_torus(1.0, 2.0, spec).unwrap();
//! let b = GeometryBundle::new(&m).unwrap();
//! let e = xi::xi_estimate(&b, &Tolerances::default()).unwrap();
//! assert!(e.is_xi);
//! let c = e.coefficients.unwrap();
//! assert!((c[1] - (0.5 - 2.0)).abs() < 1e-9);
//! ```

pub mod curves;
pub mod drift;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod report;
pub mod scalar;
pub mod surfaces;
pub mod tolerance;
pub mod xi;

pub use error::{GeoError, Result};
pub use scalar::Real;
pub use tolerance::Tolerances;

pub type Field64 = grid::Field<f64>;
pub type Field32 = grid::Field<f32>;
pub type GridSpec64 = grid::GridSpec<f64>;
pub type GridSpec32 = grid::GridSpec<f32>;
pub type Immersion64 = surfaces::ImmersionGrid<f64>;
pub type Immersion32 = surfaces::ImmersionGrid<f32>;
pub type Bundle64 = geometry::GeometryBundle<f64>;
pub type Bundle32 = geometry::GeometryBundle<f32>;
pub type Curve64 = curves::PlaneCurve<f64>;
pub type Curve32 = curves::PlaneCurve<f32>;
pub type XiEstimate64 = xi::XiEstimate<f64>;
pub type XiEstimate32 = xi::XiEstimate<f32>;

use thiserror::Error;

/// Errors raised by the geometry pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value at grid index ({p}, {q}), component {component}")]
    NonFinite { p: usize, q: usize, component: usize },

    #[error("degenerate metric: minimum {min:e} at grid index ({p}, {q})")]
    DegenerateMetric { min: f64, p: usize, q: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("curve is not closed: gap {gap:e}")]
    OpenCurve { gap: f64 },

    #[error("curve passes too close to the origin: min |γ| = {min:e}")]
    CurveThroughOrigin { min: f64 },

    #[error("surface is not Lagrangian: residual {residual:e} exceeds {tolerance:e}")]
    NotLagrangian { residual: f64, tolerance: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("integration unstable, refine the step: {0}")]
    Unstable(String),

    #[error("certification refused: {0}")]
    Certification(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T, E = GeoError> = std::result::Result<T, E>;

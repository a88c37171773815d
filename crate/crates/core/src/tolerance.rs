//! Default decision thresholds.

use serde::{Deserialize, Serialize};

/// Thresholds used when classifying a surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Largest admissible `sup|ω(x_u, x_v)|`, relative to `|x_u||x_v|`.
    pub lagrangian: f64,
    /// Largest parallel residual for which `ξ̂` counts as a parallel field.
    pub xi: f64,
    /// Largest normalized residual for which an identity counts as verified.
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            lagrangian: 1e-8,
            xi: 1e-6,
            identity: 1e-6,
        }
    }
}

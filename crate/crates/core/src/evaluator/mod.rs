//! Ground truth and benchmark drivers.
//!
//! Exact influence comes from enumerating every live-edge outcome on small
//! graphs; larger graphs use the Monte-Carlo stopping rule. Benchmarks
//! compare sketch estimates against whichever truth source fits.

pub mod bench;
mod exact;
mod monte_carlo;

pub use exact::{exact_influence, IC_EDGE_LIMIT, LT_OUTCOME_LIMIT};
pub use monte_carlo::{
    monte_carlo_influence, monte_carlo_influence_parallel, stopping_threshold, ForwardSimulator,
};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TruthMethod {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "mc_stopping_rule")]
    MonteCarlo,
}

/// A ground-truth influence value and how it was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruthEstimate {
    pub value: f64,
    pub method: TruthMethod,
    /// Zero for exact values.
    pub epsilon: f64,
    /// Zero for exact values.
    pub delta: f64,
    /// Outcomes enumerated (exact) or cascades simulated (Monte-Carlo).
    pub samples_used: u64,
}

/// `|Î - I| / max(I, Î) · 100`; zero when both are zero.
pub fn relative_difference(estimate: f64, truth: f64) -> f64 {
    let denom = estimate.max(truth);
    if denom <= 0.0 {
        0.0
    } else {
        (estimate - truth).abs() / denom * 100.0
    }
}

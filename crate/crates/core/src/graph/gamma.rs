use rand::Rng;

use super::{DiffusionModel, ProbabilisticGraph};
use crate::error::{Result, SkisError};
use crate::NodeId;

/// In-degree above which the IC product is accumulated in log space.
const LOG_SPACE_DEGREE: usize = 32;

/// Per-node probability `γ_v` that a reverse cascade rooted at `v` is
/// non-singular, their sum `Γ`, and the source distribution `γ_v / Γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaTable {
    gamma: Vec<f64>,
    total: f64,
    source_cdf: Vec<f64>,
}

impl GammaTable {
    pub fn compute(graph: &ProbabilisticGraph) -> Self {
        let gamma: Vec<f64> = (0..graph.node_count() as NodeId)
            .map(|v| match graph.model() {
                DiffusionModel::IC => ic_gamma(graph.in_weights(v)),
                DiffusionModel::LT => graph.in_weights(v).iter().sum::<f64>().min(1.0),
            })
            .collect();
        Self::from_gamma(gamma)
    }

    /// Build a table from raw per-node values, e.g. ones read back from a
    /// sketch file.
    pub fn from_gamma(gamma: Vec<f64>) -> Self {
        let total: f64 = gamma.iter().sum();
        let mut source_cdf = Vec::with_capacity(gamma.len());
        let mut acc = 0.0;
        for &g in &gamma {
            acc += g;
            source_cdf.push(if total > 0.0 { acc / total } else { 0.0 });
        }
        // Pin the tail to exactly 1 from the last positive entry onwards so
        // that a uniform draw in [0,1) never lands on a zero-mass node.
        if let Some(last) = gamma.iter().rposition(|&g| g > 0.0) {
            for c in &mut source_cdf[last..] {
                *c = 1.0;
            }
        }
        GammaTable {
            gamma,
            total,
            source_cdf,
        }
    }

    #[inline]
    pub fn gamma(&self, v: NodeId) -> f64 {
        self.gamma[v as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.gamma
    }

    /// `Γ = Σ_v γ_v`.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// `Γ / n`, the non-singular share of reverse cascades.
    pub fn gamma_0(&self) -> f64 {
        if self.gamma.is_empty() {
            0.0
        } else {
            self.total / self.gamma.len() as f64
        }
    }

    pub fn source_cdf(&self) -> &[f64] {
        &self.source_cdf
    }

    pub fn node_count(&self) -> usize {
        self.gamma.len()
    }

    /// Draw a source node with probability `γ_v / Γ`.
    pub fn draw_source<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<NodeId> {
        if !(self.total > 0.0) {
            return Err(SkisError::NoMass);
        }
        let u: f64 = rng.random();
        let idx = self.source_cdf.partition_point(|&c| c <= u);
        Ok(idx.min(self.source_cdf.len() - 1) as NodeId)
    }
}

fn ic_gamma(weights: &[f64]) -> f64 {
    if weights.iter().any(|&w| w >= 1.0) {
        return 1.0;
    }
    if weights.len() > LOG_SPACE_DEGREE {
        let log_miss: f64 = weights.iter().map(|&w| (-w).ln_1p()).sum();
        -log_miss.exp_m1()
    } else {
        1.0 - weights.iter().map(|&w| 1.0 - w).product::<f64>()
    }
}

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Result, SkisError};
use crate::oracle::estimate_influence;
use crate::sketch::{Sketch, SketchKind};
use crate::NodeId;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedySolution {
    /// Seeds in selection order.
    pub seeds: Vec<NodeId>,
    /// Estimated influence of the full seed set on the sketch.
    pub objective: f64,
    /// Marginal gain of each seed at the step it was picked.
    pub per_step_gains: Vec<f64>,
    pub coverage: usize,
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    gain: f64,
    node: NodeId,
    /// Selection round at which `gain` was computed.
    round: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // Max-heap on gain; smaller node id wins ties.
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Greedy seed selection on a sketch, `k` rounds.
///
/// Each round adds the node maximizing `Δ_R(v,S)/T · Γ + (1 - γ_v)` (SKIS)
/// or `Δ_R(v,S)/T · n` (RIS), where `Δ_R` is the number of newly covered
/// samples. Candidates are re-evaluated lazily: the estimate is monotone and
/// submodular, so a stale gain is an upper bound on the current one.
pub fn greedy(sketch: &Sketch, k: usize) -> Result<GreedySolution> {
    let n = sketch.node_count();
    if k == 0 || k > n {
        return Err(SkisError::validation(format!(
            "k must lie in 1..={n}, got {k}"
        )));
    }
    if sketch.is_empty() {
        return Err(SkisError::NoSamples);
    }
    let t = sketch.len() as f64;
    let (scale, has_bonus) = match sketch.kind() {
        SketchKind::SKIS => (sketch.gamma_total() / t, true),
        SketchKind::RIS => (n as f64 / t, false),
    };
    let bonus = |v: NodeId| {
        if has_bonus {
            1.0 - sketch.gamma(v)
        } else {
            0.0
        }
    };

    let mut covered = vec![false; sketch.len()];
    let marginal = |v: NodeId, covered: &[bool]| {
        sketch
            .samples_containing(v)
            .iter()
            .filter(|&&j| !covered[j as usize])
            .count()
    };

    let mut heap: BinaryHeap<Candidate> = (0..n as NodeId)
        .map(|v| Candidate {
            gain: sketch.samples_containing(v).len() as f64 * scale + bonus(v),
            node: v,
            round: 0,
        })
        .collect();

    let mut seeds = Vec::with_capacity(k);
    let mut gains = Vec::with_capacity(k);
    let mut total_covered = 0usize;
    while seeds.len() < k {
        let top = heap.pop().expect("k <= n leaves candidates in the heap");
        let round = seeds.len();
        if top.round == round {
            for &j in sketch.samples_containing(top.node) {
                if !covered[j as usize] {
                    covered[j as usize] = true;
                    total_covered += 1;
                }
            }
            seeds.push(top.node);
            gains.push(top.gain);
        } else {
            heap.push(Candidate {
                gain: marginal(top.node, &covered) as f64 * scale + bonus(top.node),
                node: top.node,
                round,
            });
        }
    }

    let objective = estimate_influence(sketch, &seeds)?.value;
    Ok(GreedySolution {
        seeds,
        objective,
        per_step_gains: gains,
        coverage: total_covered,
    })
}

//! Synthetic graphs for benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{DiffusionModel, ProbabilisticGraph};
use crate::error::{Result, SkisError};
use crate::NodeId;

/// Barabási–Albert preferential attachment.
///
/// Each arriving node attaches to `m` distinct earlier nodes chosen with
/// probability proportional to their degree; edges point from the newcomer
/// to the nodes it attached to, so popular nodes collect large in-degree and
/// recent nodes have none. Node labels are shuffled afterwards so ids carry no
/// information about arrival order. All weights are zero; assign a weight
/// scheme before use.
pub fn preferential_attachment<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    model: DiffusionModel,
    rng: &mut R,
) -> Result<ProbabilisticGraph> {
    if m == 0 || n <= m {
        return Err(SkisError::validation(format!(
            "preferential attachment needs n > m >= 1 (n={n}, m={m})"
        )));
    }
    let mut endpoints: Vec<NodeId> = (0..m as NodeId).collect();
    let mut edges = Vec::with_capacity((n - m) * m);
    let mut picked = Vec::with_capacity(m);
    for new in m..n {
        picked.clear();
        while picked.len() < m {
            let cand = endpoints[rng.random_range(0..endpoints.len())];
            if !picked.contains(&cand) {
                picked.push(cand);
            }
        }
        for &old in &picked {
            edges.push((new as NodeId, old, 0.0));
            endpoints.push(old);
            endpoints.push(new as NodeId);
        }
    }
    let mut relabel: Vec<NodeId> = (0..n as NodeId).collect();
    relabel.shuffle(rng);
    let edges = edges
        .into_iter()
        .map(|(u, v, w)| (relabel[u as usize], relabel[v as usize], w))
        .collect();
    ProbabilisticGraph::from_edges(n, edges, model)
}

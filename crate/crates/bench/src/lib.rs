//! Benchmark inputs shared by the criterion targets.

use skis::graph::generate::preferential_attachment;
use skis::{DiffusionModel, GammaTable, ProbabilisticGraph, RngStream};

/// Weighted-cascade preferential attachment graph with its γ table.
pub fn workload(nodes: usize, model: DiffusionModel) -> (ProbabilisticGraph, GammaTable) {
    let mut rng = RngStream::new(17, 0);
    let graph = preferential_attachment(nodes, 2, model, &mut rng)
        .expect("valid generator parameters")
        .assign_weighted_cascade();
    let gamma = GammaTable::compute(&graph);
    (graph, gamma)
}

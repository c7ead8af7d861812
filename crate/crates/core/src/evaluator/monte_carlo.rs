use std::f64::consts::E;

use rand::Rng;
use rayon::prelude::*;

use super::{TruthEstimate, TruthMethod};
use crate::error::{Result, SkisError};
use crate::graph::{DiffusionModel, ProbabilisticGraph};
use crate::oracle::normalize_seeds;
use crate::rng::RngStream;
use crate::sampler::VisitMarks;
use crate::NodeId;

/// Stopping threshold `Υ = 4(e - 2) · ln(2/δ) · ε⁻²` on `Σ Z_j`.
pub fn stopping_threshold(epsilon: f64, delta: f64) -> f64 {
    4.0 * (E - 2.0) * (2.0 / delta).ln() / (epsilon * epsilon)
}

/// Forward cascade simulator with reusable scratch space.
pub struct ForwardSimulator<'a> {
    graph: &'a ProbabilisticGraph,
    active: VisitMarks,
    touched: VisitMarks,
    threshold: Vec<f64>,
    incoming: Vec<f64>,
    queue: Vec<NodeId>,
}

impl<'a> ForwardSimulator<'a> {
    pub fn new(graph: &'a ProbabilisticGraph) -> Self {
        let n = graph.node_count();
        let lt = graph.model() == DiffusionModel::LT;
        ForwardSimulator {
            graph,
            active: VisitMarks::new(n),
            touched: VisitMarks::new(if lt { n } else { 0 }),
            threshold: vec![0.0; if lt { n } else { 0 }],
            incoming: vec![0.0; if lt { n } else { 0 }],
            queue: Vec::new(),
        }
    }

    /// Number of nodes activated by one random cascade from `seeds`
    /// (assumed distinct and in range).
    pub fn cascade_size<R: Rng + ?Sized>(&mut self, seeds: &[NodeId], rng: &mut R) -> usize {
        let graph = self.graph;
        self.active.clear();
        self.queue.clear();
        for &s in seeds {
            if self.active.insert(s) {
                self.queue.push(s);
            }
        }
        let mut head = 0;
        match graph.model() {
            DiffusionModel::IC => {
                while head < self.queue.len() {
                    let u = self.queue[head];
                    head += 1;
                    for (v, w) in graph.out_edges(u) {
                        if !self.active.contains(v) && rng.random::<f64>() < w {
                            self.active.insert(v);
                            self.queue.push(v);
                        }
                    }
                }
            }
            DiffusionModel::LT => {
                self.touched.clear();
                while head < self.queue.len() {
                    let u = self.queue[head];
                    head += 1;
                    for (v, w) in graph.out_edges(u) {
                        if self.active.contains(v) {
                            continue;
                        }
                        let slot = v as usize;
                        if self.touched.insert(v) {
                            self.threshold[slot] = rng.random();
                            self.incoming[slot] = 0.0;
                        }
                        self.incoming[slot] += w;
                        // Strict: a zero-weight edge never activates.
                        if self.incoming[slot] > self.threshold[slot] {
                            self.active.insert(v);
                            self.queue.push(v);
                        }
                    }
                }
            }
        }
        self.queue.len()
    }
}

fn check_params(
    graph: &ProbabilisticGraph,
    seeds: &[NodeId],
    epsilon: f64,
    delta: f64,
) -> Result<Vec<NodeId>> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(SkisError::validation(format!(
            "epsilon must lie in (0,1), got {epsilon}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(SkisError::validation(format!(
            "delta must lie in (0,1), got {delta}"
        )));
    }
    let seeds = normalize_seeds(seeds, graph.node_count())?;
    if seeds.is_empty() {
        return Err(SkisError::validation("seed set is empty"));
    }
    Ok(seeds)
}

/// Monte-Carlo stopping rule: simulate cascades, `Z_j = W_j / n`, until
/// `Σ Z_j ≥ Υ`; return `(Σ Z_j / T) · n`.
pub fn monte_carlo_influence<R: Rng + ?Sized>(
    graph: &ProbabilisticGraph,
    seeds: &[NodeId],
    epsilon: f64,
    delta: f64,
    rng: &mut R,
) -> Result<TruthEstimate> {
    let seeds = check_params(graph, seeds, epsilon, delta)?;
    let n = graph.node_count() as f64;
    let target = stopping_threshold(epsilon, delta);
    let mut sim = ForwardSimulator::new(graph);
    // Σ Z_j ≥ Υ checked on the integer sum of cascade sizes
    let mut total = 0u64;
    let mut count = 0u64;
    while (total as f64) < target * n {
        total += sim.cascade_size(&seeds, rng) as u64;
        count += 1;
    }
    Ok(estimate(total, count, epsilon, delta))
}

/// Parallel stopping rule.
///
/// Workers simulate batches on streams `0..workers` of `seed`. Batches are
/// consumed in worker order and the count stops at the exact first
/// crossing, so the result depends only on `(seed, workers)`.
pub fn monte_carlo_influence_parallel(
    graph: &ProbabilisticGraph,
    seeds: &[NodeId],
    epsilon: f64,
    delta: f64,
    seed: u64,
    workers: usize,
) -> Result<TruthEstimate> {
    let workers = workers.max(1);
    if workers == 1 {
        let mut rng = RngStream::new(seed, 0);
        return monte_carlo_influence(graph, seeds, epsilon, delta, &mut rng);
    }
    let seeds = check_params(graph, seeds, epsilon, delta)?;
    let n = graph.node_count() as f64;
    let target = stopping_threshold(epsilon, delta);
    let mut states: Vec<(RngStream, ForwardSimulator)> = (0..workers)
        .map(|w| (RngStream::new(seed, w as u64), ForwardSimulator::new(graph)))
        .collect();
    let mut total = 0u64;
    let mut count = 0u64;
    let mut batch = 256usize;
    loop {
        let results: Vec<Vec<usize>> = states
            .par_iter_mut()
            .map(|(rng, sim)| (0..batch).map(|_| sim.cascade_size(&seeds, rng)).collect())
            .collect();
        for &size in results.iter().flatten() {
            total += size as u64;
            count += 1;
            if total as f64 >= target * n {
                return Ok(estimate(total, count, epsilon, delta));
            }
        }
        // aim the next round at the remaining mass
        let mean = total as f64 / count as f64;
        let remaining = ((target * n - total as f64) / mean / workers as f64).ceil() as usize;
        batch = remaining.clamp(256, 1 << 16);
    }
}

fn estimate(total: u64, count: u64, epsilon: f64, delta: f64) -> TruthEstimate {
    TruthEstimate {
        value: total as f64 / count as f64,
        method: TruthMethod::MonteCarlo,
        epsilon,
        delta,
        samples_used: count,
    }
}

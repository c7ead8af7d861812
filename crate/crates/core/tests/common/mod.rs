//! Brute-force references shared by integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use skis::evaluator::exact_influence;
use skis::fixtures::{self, Fixture};
use skis::{DiffusionModel, NodeId, ProbabilisticGraph};

pub fn load_fixtures() -> Vec<(Fixture, ProbabilisticGraph)> {
    fixtures::list()
        .unwrap()
        .into_iter()
        .map(|f| {
            let g = f.load().unwrap();
            (f, g)
        })
        .collect()
}

pub fn fixture(name: &str) -> ProbabilisticGraph {
    fixtures::find(name).unwrap().load().unwrap()
}

/// Every live-edge outcome as (probability, live edges).
pub fn live_edge_outcomes(g: &ProbabilisticGraph) -> Vec<(f64, Vec<(NodeId, NodeId)>)> {
    let edges: Vec<(NodeId, NodeId, f64)> = g.edges().collect();
    let n = g.node_count();
    let mut out = Vec::new();
    match g.model() {
        DiffusionModel::IC => {
            for mask in 0u64..(1 << edges.len()) {
                let mut p = 1.0;
                let mut live = Vec::new();
                for (i, &(u, v, w)) in edges.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        p *= w;
                        live.push((u, v));
                    } else {
                        p *= 1.0 - w;
                    }
                }
                if p > 0.0 {
                    out.push((p, live));
                }
            }
        }
        DiffusionModel::LT => {
            // each node keeps at most one in-edge
            let mut partial = vec![(1.0, Vec::new())];
            for v in 0..n as NodeId {
                let ins: Vec<(NodeId, f64)> = edges
                    .iter()
                    .filter(|e| e.1 == v)
                    .map(|e| (e.0, e.2))
                    .collect();
                let none = 1.0 - ins.iter().map(|e| e.1).sum::<f64>();
                let mut next = Vec::new();
                for (p, live) in &partial {
                    if none > 1e-15 {
                        next.push((p * none, live.clone()));
                    }
                    for &(u, w) in &ins {
                        if w > 0.0 {
                            let mut l: Vec<(NodeId, NodeId)> = live.clone();
                            l.push((u, v));
                            next.push((p * w, l));
                        }
                    }
                }
                partial = next;
            }
            out = partial;
        }
    }
    out
}

fn reverse_reach(n: usize, live: &[(NodeId, NodeId)], source: NodeId) -> Vec<NodeId> {
    let mut seen = vec![false; n];
    seen[source as usize] = true;
    let mut stack = vec![source];
    while let Some(v) = stack.pop() {
        for &(a, b) in live {
            if b == v && !seen[a as usize] {
                seen[a as usize] = true;
                stack.push(a);
            }
        }
    }
    (0..n as NodeId).filter(|&v| seen[v as usize]).collect()
}

/// Law of an RIS sample as a sorted node set.
pub fn ris_distribution(g: &ProbabilisticGraph) -> BTreeMap<Vec<NodeId>, f64> {
    let n = g.node_count();
    let mut dist = BTreeMap::new();
    for (p, live) in live_edge_outcomes(g) {
        for s in 0..n as NodeId {
            *dist.entry(reverse_reach(n, &live, s)).or_insert(0.0) += p / n as f64;
        }
    }
    dist
}

/// `I(S) = n · Pr[R ∩ S ≠ ∅]` from the enumerated RIS law.
pub fn influence_from_ris(dist: &BTreeMap<Vec<NodeId>, f64>, n: usize, seeds: &[NodeId]) -> f64 {
    let hit: f64 = dist
        .iter()
        .filter(|(r, _)| r.iter().any(|v| seeds.contains(v)))
        .map(|(_, p)| p)
        .sum();
    n as f64 * hit
}

/// All non-empty subsets of `0..n` as sorted vectors.
pub fn all_subsets(n: usize) -> Vec<Vec<NodeId>> {
    (1u32..(1 << n))
        .map(|mask| (0..n as NodeId).filter(|v| mask >> v & 1 == 1).collect())
        .collect()
}

pub fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<NodeId>> {
    all_subsets(n)
        .into_iter()
        .filter(|s| s.len() == k)
        .collect()
}

/// Best exact influence over all `k`-subsets.
pub fn exhaustive_opt(g: &ProbabilisticGraph, k: usize) -> f64 {
    subsets_of_size(g.node_count(), k)
        .iter()
        .map(|s| exact_influence(g, s).unwrap().value)
        .fold(0.0, f64::max)
}

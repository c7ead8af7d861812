use super::{TruthEstimate, TruthMethod};
use crate::error::{Result, SkisError};
use crate::graph::{DiffusionModel, ProbabilisticGraph};
use crate::oracle::normalize_seeds;
use crate::NodeId;

/// Largest edge count enumerated under IC (2^m outcomes).
pub const IC_EDGE_LIMIT: usize = 22;
/// Largest `Π_v (d_in(v) + 1)` enumerated under LT.
pub const LT_OUTCOME_LIMIT: u64 = 1 << 22;

/// Expected forward reach of `seeds`, summed over every live-edge outcome
/// weighted by its probability.
pub fn exact_influence(graph: &ProbabilisticGraph, seeds: &[NodeId]) -> Result<TruthEstimate> {
    let seeds = normalize_seeds(seeds, graph.node_count())?;
    let (value, outcomes) = if seeds.len() == graph.node_count() {
        (seeds.len() as f64, 1)
    } else {
        match graph.model() {
            DiffusionModel::IC => exact_ic(graph, &seeds)?,
            DiffusionModel::LT => exact_lt(graph, &seeds)?,
        }
    };
    Ok(TruthEstimate {
        value,
        method: TruthMethod::Exact,
        epsilon: 0.0,
        delta: 0.0,
        samples_used: outcomes,
    })
}

/// Forward edges numbered in out-CSR order.
struct ForwardEdges {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Vec<f64>,
}

impl ForwardEdges {
    fn new(graph: &ProbabilisticGraph) -> Self {
        let n = graph.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(graph.edge_count());
        let mut weights = Vec::with_capacity(graph.edge_count());
        offsets.push(0);
        for u in 0..n as NodeId {
            for (v, w) in graph.out_edges(u) {
                targets.push(v);
                weights.push(w);
            }
            offsets.push(targets.len());
        }
        ForwardEdges {
            offsets,
            targets,
            weights,
        }
    }
}

/// Reach of `seeds` through edges accepted by `live`.
fn reach(
    edges: &ForwardEdges,
    seeds: &[NodeId],
    active: &mut [bool],
    queue: &mut Vec<NodeId>,
    live: impl Fn(usize, NodeId, NodeId) -> bool,
) -> usize {
    active.iter_mut().for_each(|a| *a = false);
    queue.clear();
    for &s in seeds {
        active[s as usize] = true;
        queue.push(s);
    }
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        for e in edges.offsets[u as usize]..edges.offsets[u as usize + 1] {
            let v = edges.targets[e];
            if !active[v as usize] && live(e, u, v) {
                active[v as usize] = true;
                queue.push(v);
            }
        }
    }
    queue.len()
}

fn exact_ic(graph: &ProbabilisticGraph, seeds: &[NodeId]) -> Result<(f64, u64)> {
    let m = graph.edge_count();
    if m > IC_EDGE_LIMIT {
        return Err(SkisError::TooLarge {
            what: "IC edge count",
            actual: m as f64,
            limit: IC_EDGE_LIMIT as f64,
        });
    }
    let edges = ForwardEdges::new(graph);
    // Only edges with 0 < w < 1 are random; the rest are fixed.
    let uncertain: Vec<usize> = (0..m)
        .filter(|&e| edges.weights[e] > 0.0 && edges.weights[e] < 1.0)
        .collect();
    let mut live: Vec<bool> = edges.weights.iter().map(|&w| w >= 1.0).collect();
    let mut active = vec![false; graph.node_count()];
    let mut queue = Vec::new();
    let mut total = 0.0;
    let outcomes = 1u64 << uncertain.len();
    for mask in 0..outcomes {
        let mut p = 1.0;
        for (bit, &e) in uncertain.iter().enumerate() {
            let on = mask >> bit & 1 == 1;
            live[e] = on;
            p *= if on {
                edges.weights[e]
            } else {
                1.0 - edges.weights[e]
            };
        }
        let r = reach(&edges, seeds, &mut active, &mut queue, |e, _, _| live[e]);
        total += p * r as f64;
    }
    Ok((total, outcomes))
}

fn exact_lt(graph: &ProbabilisticGraph, seeds: &[NodeId]) -> Result<(f64, u64)> {
    let n = graph.node_count();
    // Choice c at node v: c < d_in picks in-edge c, c == d_in picks none.
    let mut radix = Vec::with_capacity(n);
    let mut outcomes: f64 = 1.0;
    for v in 0..n as NodeId {
        let d = graph.in_degree(v);
        radix.push(d + 1);
        outcomes *= (d + 1) as f64;
    }
    if outcomes > LT_OUTCOME_LIMIT as f64 {
        return Err(SkisError::TooLarge {
            what: "LT live-edge outcomes",
            actual: outcomes,
            limit: LT_OUTCOME_LIMIT as f64,
        });
    }
    let choice_prob = |v: NodeId, c: usize| -> f64 {
        let w = graph.in_weights(v);
        if c < w.len() {
            w[c]
        } else {
            (1.0 - w.iter().sum::<f64>()).max(0.0)
        }
    };
    let edges = ForwardEdges::new(graph);
    let mut active = vec![false; n];
    let mut queue = Vec::new();
    let mut choice = vec![0usize; n];
    let mut total = 0.0;
    let mut count = 0u64;
    loop {
        let p: f64 = (0..n)
            .map(|v| choice_prob(v as NodeId, choice[v]))
            .product();
        if p > 0.0 {
            let picked = |v: NodeId| -> Option<NodeId> {
                graph.in_neighbors(v).get(choice[v as usize]).copied()
            };
            let r = reach(&edges, seeds, &mut active, &mut queue, |_, u, v| {
                picked(v) == Some(u)
            });
            total += p * r as f64;
        }
        count += 1;
        // mixed-radix increment
        let mut i = 0;
        loop {
            if i == n {
                return Ok((total, count));
            }
            choice[i] += 1;
            if choice[i] < radix[i] {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(u32, u32, f64)], model: DiffusionModel) -> ProbabilisticGraph {
        ProbabilisticGraph::from_edges(n, edges.to_vec(), model).unwrap()
    }

    fn value(g: &ProbabilisticGraph, seeds: &[NodeId]) -> f64 {
        exact_influence(g, seeds).unwrap().value
    }

    #[test]
    fn single_edge() {
        let g = graph(2, &[(0, 1, 0.5)], DiffusionModel::IC);
        assert!((value(&g, &[0]) - 1.5).abs() < 1e-15);
        assert!((value(&g, &[1]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn path() {
        let g = graph(3, &[(0, 1, 0.1), (1, 2, 0.1)], DiffusionModel::IC);
        assert!((value(&g, &[0]) - 1.11).abs() < 1e-12);
        assert!((value(&g, &[0, 1, 2]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn diamond_ic_by_hand() {
        // 0→1, 0→2, 1→3, 2→3 all 0.5:
        // I = 1 + 0.5 + 0.5 + Pr[3] with Pr[3] = 1 - (1 - 0.25)^2 = 0.4375
        let g = graph(
            4,
            &[(0, 1, 0.5), (0, 2, 0.5), (1, 3, 0.5), (2, 3, 0.5)],
            DiffusionModel::IC,
        );
        assert!((value(&g, &[0]) - 2.4375).abs() < 1e-12);
    }

    #[test]
    fn lt_by_hand() {
        // 0→2 (0.3), 1→2 (0.4); seeds {0}: 1 + 0.3
        let g = graph(3, &[(0, 2, 0.3), (1, 2, 0.4)], DiffusionModel::LT);
        assert!((value(&g, &[0]) - 1.3).abs() < 1e-12);
        assert!((value(&g, &[0, 1]) - 2.7).abs() < 1e-12);
        // LT path 0→1→2 with 0.5 each: 1 + 0.5 + 0.25
        let p = graph(3, &[(0, 1, 0.5), (1, 2, 0.5)], DiffusionModel::LT);
        assert!((value(&p, &[0]) - 1.75).abs() < 1e-12);
    }

    #[test]
    fn monotone_and_bounded() {
        let g = graph(
            5,
            &[
                (0, 1, 0.3),
                (1, 2, 0.6),
                (2, 0, 0.2),
                (3, 4, 0.9),
                (1, 4, 0.5),
                (4, 2, 0.1),
            ],
            DiffusionModel::IC,
        );
        for mask in 1u32..32 {
            let s: Vec<NodeId> = (0..5).filter(|i| mask >> i & 1 == 1).collect();
            let v = value(&g, &s);
            assert!(v >= s.len() as f64 - 1e-12 && v <= 5.0 + 1e-12);
            for extra in 0..5 {
                if mask >> extra & 1 == 0 {
                    let mut bigger = s.clone();
                    bigger.push(extra);
                    assert!(value(&g, &bigger) >= v - 1e-12);
                }
            }
        }
    }

    #[test]
    fn size_limits() {
        let edges: Vec<_> = (0..23u32).map(|i| (i, i + 1, 0.5)).collect();
        let g = graph(24, &edges, DiffusionModel::IC);
        assert!(matches!(
            exact_influence(&g, &[0]),
            Err(SkisError::TooLarge { .. })
        ));
        // deterministic edges still count toward the limit
        let edges: Vec<_> = (0..23u32).map(|i| (i, i + 1, 1.0)).collect();
        let g = graph(24, &edges, DiffusionModel::IC);
        assert!(exact_influence(&g, &[0]).is_err());
    }

    #[test]
    fn certain_edges_skip_enumeration() {
        let g = graph(3, &[(0, 1, 1.0), (1, 2, 0.5)], DiffusionModel::IC);
        let t = exact_influence(&g, &[0]).unwrap();
        assert_eq!(t.samples_used, 2);
        assert!((t.value - 2.5).abs() < 1e-12);
        assert_eq!(t.method, TruthMethod::Exact);
        assert_eq!((t.epsilon, t.delta), (0.0, 0.0));
    }
}

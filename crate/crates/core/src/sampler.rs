//! Reverse cascade samplers.
//!
//! Importance influence sampling (IIS) draws only non-singular reverse
//! cascades: the source is drawn with probability `γ_v / Γ`, and the first
//! live in-edge of the source is forced by choosing the bucket of the first
//! in-neighbor that reaches it. Plain reverse reachable (RIS) sampling is
//! provided for comparison. Both exist for the IC and LT models.

use rand::Rng;

use crate::error::{Result, SkisError};
use crate::graph::{DiffusionModel, GammaTable, ProbabilisticGraph};
use crate::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SampleKind {
    /// Importance sample, never singular.
    IIS,
    /// Plain reverse reachable sample.
    RIS,
}

/// One reverse cascade: its source and every node that reaches it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub source: NodeId,
    /// Sorted ascending, no duplicates, contains `source`.
    pub nodes: Vec<NodeId>,
    pub kind: SampleKind,
}

impl Sample {
    pub fn is_singular(&self) -> bool {
        self.nodes.len() == 1
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }
}

/// Epoch-stamped visited set. Clearing is O(1) by bumping the epoch.
#[derive(Clone, Debug)]
pub struct VisitMarks {
    stamps: Vec<u32>,
    epoch: u32,
}

impl VisitMarks {
    pub fn new(n: usize) -> Self {
        VisitMarks {
            stamps: vec![0; n],
            epoch: 0,
        }
    }

    /// Forget every mark.
    pub fn clear(&mut self) {
        if self.epoch == u32::MAX {
            self.stamps.iter_mut().for_each(|s| *s = 0);
            self.epoch = 0;
        }
        self.epoch += 1;
    }

    /// Mark `v`; returns `false` if it was already marked.
    #[inline]
    pub fn insert(&mut self, v: NodeId) -> bool {
        let slot = &mut self.stamps[v as usize];
        if *slot == self.epoch {
            false
        } else {
            *slot = self.epoch;
            true
        }
    }

    #[inline]
    pub fn contains(&self, v: NodeId) -> bool {
        self.stamps[v as usize] == self.epoch
    }
}

/// Pick the bucket of the first live in-edge, given that at least one is
/// live. Bucket `i` has probability `Π_{t<i}(1 - w_t) · w_i / γ_v`.
pub fn select_bucket<R: Rng + ?Sized>(in_weights: &[f64], gamma_v: f64, rng: &mut R) -> usize {
    debug_assert!(gamma_v > 0.0 && !in_weights.is_empty());
    let target = rng.random::<f64>() * gamma_v;
    let mut acc = 0.0;
    let mut miss = 1.0;
    for (i, &w) in in_weights.iter().enumerate() {
        acc += miss * w;
        if target < acc {
            return i;
        }
        miss *= 1.0 - w;
    }
    last_positive(in_weights)
}

/// Pick one in-edge proportionally to weight, given that one is picked.
fn select_proportional<R: Rng + ?Sized>(in_weights: &[f64], total: f64, rng: &mut R) -> usize {
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, &w) in in_weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return i;
        }
    }
    last_positive(in_weights)
}

// Float slack: the walk can end a hair short of γ_v.
fn last_positive(weights: &[f64]) -> usize {
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// LT live-edge pick: in-edge `i` with probability `w_i`, none with
/// probability `1 - Σ w`.
#[inline]
fn lt_pick<R: Rng + ?Sized>(in_weights: &[f64], rng: &mut R) -> Option<usize> {
    let target: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &w) in in_weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return Some(i);
        }
    }
    None
}

/// Per-worker sampler. Holds the visited scratch space; the graph and
/// gamma table are shared read-only.
pub struct Sampler<'a> {
    graph: &'a ProbabilisticGraph,
    gamma: &'a GammaTable,
    marks: VisitMarks,
}

impl<'a> Sampler<'a> {
    pub fn new(graph: &'a ProbabilisticGraph, gamma: &'a GammaTable) -> Self {
        Sampler {
            graph,
            gamma,
            marks: VisitMarks::new(graph.node_count()),
        }
    }

    pub fn graph(&self) -> &'a ProbabilisticGraph {
        self.graph
    }

    /// Draw one sample of `kind` under the graph's model.
    pub fn sample<R: Rng + ?Sized>(&mut self, kind: SampleKind, rng: &mut R) -> Result<Sample> {
        let mut nodes = Vec::new();
        let source = self.fill(kind, rng, &mut nodes)?;
        nodes.sort_unstable();
        Ok(Sample {
            source,
            nodes,
            kind,
        })
    }

    /// Append one sample's nodes to `out` in visit order (source first) and
    /// return the source.
    pub fn fill<R: Rng + ?Sized>(
        &mut self,
        kind: SampleKind,
        rng: &mut R,
        out: &mut Vec<NodeId>,
    ) -> Result<NodeId> {
        match (self.graph.model(), kind) {
            (DiffusionModel::IC, SampleKind::IIS) => self.fill_iis_ic(rng, out),
            (DiffusionModel::IC, SampleKind::RIS) => self.fill_ris_ic(rng, out),
            (DiffusionModel::LT, SampleKind::IIS) => self.fill_iis_lt(rng, out),
            (DiffusionModel::LT, SampleKind::RIS) => self.fill_ris_lt(rng, out),
        }
    }

    pub fn sample_iis_ic<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Sample> {
        self.require(DiffusionModel::IC)?;
        self.sample(SampleKind::IIS, rng)
    }

    pub fn sample_ris_ic<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Sample> {
        self.require(DiffusionModel::IC)?;
        self.sample(SampleKind::RIS, rng)
    }

    pub fn sample_iis_lt<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Sample> {
        self.require(DiffusionModel::LT)?;
        self.sample(SampleKind::IIS, rng)
    }

    pub fn sample_ris_lt<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Sample> {
        self.require(DiffusionModel::LT)?;
        self.sample(SampleKind::RIS, rng)
    }

    fn require(&self, model: DiffusionModel) -> Result<()> {
        if self.graph.model() != model {
            return Err(SkisError::validation(format!(
                "sampler for {model} called on a {} graph",
                self.graph.model()
            )));
        }
        Ok(())
    }

    fn uniform_source<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<NodeId> {
        let n = self.graph.node_count();
        if n == 0 {
            return Err(SkisError::validation("cannot sample from an empty graph"));
        }
        Ok(rng.random_range(0..n) as NodeId)
    }

    fn fill_iis_ic<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        out: &mut Vec<NodeId>,
    ) -> Result<NodeId> {
        let v = self.gamma.draw_source(rng)?;
        let graph = self.graph;
        self.marks.clear();
        self.marks.insert(v);
        out.push(v);
        let head = out.len();

        let sources = graph.in_neighbors(v);
        let weights = graph.in_weights(v);
        let first = select_bucket(weights, self.gamma.gamma(v), rng);
        self.marks.insert(sources[first]);
        out.push(sources[first]);
        // Edges before the bucket are dead by construction; later ones
        // follow the ordinary coin flips.
        for t in first + 1..sources.len() {
            if rng.random::<f64>() < weights[t] {
                self.marks.insert(sources[t]);
                out.push(sources[t]);
            }
        }
        self.reverse_bfs(rng, out, head);
        Ok(v)
    }

    fn fill_ris_ic<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        out: &mut Vec<NodeId>,
    ) -> Result<NodeId> {
        let v = self.uniform_source(rng)?;
        self.marks.clear();
        self.marks.insert(v);
        let head = out.len();
        out.push(v);
        self.reverse_bfs(rng, out, head);
        Ok(v)
    }

    /// FIFO expansion over `out[head..]`; the tail of `out` is the queue.
    fn reverse_bfs<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        out: &mut Vec<NodeId>,
        mut head: usize,
    ) {
        let graph = self.graph;
        while head < out.len() {
            let x = out[head];
            head += 1;
            for (&u, &w) in graph.in_neighbors(x).iter().zip(graph.in_weights(x)) {
                if !self.marks.contains(u) && rng.random::<f64>() < w {
                    self.marks.insert(u);
                    out.push(u);
                }
            }
        }
    }

    fn fill_iis_lt<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        out: &mut Vec<NodeId>,
    ) -> Result<NodeId> {
        let v = self.gamma.draw_source(rng)?;
        let graph = self.graph;
        self.marks.clear();
        self.marks.insert(v);
        out.push(v);
        let pick = select_proportional(graph.in_weights(v), self.gamma.gamma(v), rng);
        let u = graph.in_neighbors(v)[pick];
        self.marks.insert(u);
        out.push(u);
        self.lt_walk(rng, out, u);
        Ok(v)
    }

    fn fill_ris_lt<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        out: &mut Vec<NodeId>,
    ) -> Result<NodeId> {
        let v = self.uniform_source(rng)?;
        self.marks.clear();
        self.marks.insert(v);
        out.push(v);
        self.lt_walk(rng, out, v);
        Ok(v)
    }

    /// Follow single live in-edges backwards until no edge is picked or the
    /// picked node was already reached.
    fn lt_walk<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        out: &mut Vec<NodeId>,
        mut current: NodeId,
    ) {
        let graph = self.graph;
        while let Some(i) = lt_pick(graph.in_weights(current), rng) {
            let next = graph.in_neighbors(current)[i];
            if !self.marks.insert(next) {
                break;
            }
            out.push(next);
            current = next;
        }
    }
}

//! Probabilistic directed graphs and the per-node non-singularity table.

mod gamma;
pub mod generate;
mod load;

use std::fmt;
use std::hash::Hasher;
use std::str::FromStr;

use fnv::FnvHasher;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SkisError};
use crate::NodeId;

pub use gamma::GammaTable;
pub use load::load_edge_list;

/// Tolerance on the incoming weight sum of a node under LT.
pub const LT_SUM_TOLERANCE: f64 = 1e-9;

const TRIVALENCY: [f64; 3] = [0.1, 0.01, 0.001];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffusionModel {
    /// Independent Cascade.
    #[serde(rename = "ic")]
    IC,
    /// Linear Threshold.
    #[serde(rename = "lt")]
    LT,
}

impl DiffusionModel {
    pub(crate) fn code(self) -> u8 {
        match self {
            DiffusionModel::IC => 0,
            DiffusionModel::LT => 1,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(DiffusionModel::IC),
            1 => Some(DiffusionModel::LT),
            _ => None,
        }
    }
}

impl fmt::Display for DiffusionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiffusionModel::IC => "ic",
            DiffusionModel::LT => "lt",
        })
    }
}

impl FromStr for DiffusionModel {
    type Err = SkisError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ic" => Ok(DiffusionModel::IC),
            "lt" => Ok(DiffusionModel::LT),
            other => Err(SkisError::validation(format!("unknown model {other:?}"))),
        }
    }
}

/// How edge weights are obtained when loading an edge list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// Third column of the edge list.
    Given,
    /// Weighted cascade: `w(u,v) = 1 / d_in(v)`.
    Wc,
    /// Trivalency: uniform over {0.1, 0.01, 0.001}.
    Tri,
    /// LT random normalization: in-weights of `v` rescaled to sum to a
    /// fresh uniform draw.
    LtRandom,
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMode::Given => "given",
            WeightMode::Wc => "wc",
            WeightMode::Tri => "tri",
            WeightMode::LtRandom => "lt_random",
        })
    }
}

impl FromStr for WeightMode {
    type Err = SkisError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "given" => Ok(WeightMode::Given),
            "wc" => Ok(WeightMode::Wc),
            "tri" => Ok(WeightMode::Tri),
            "lt_random" => Ok(WeightMode::LtRandom),
            other => Err(SkisError::validation(format!(
                "unknown weight mode {other:?}"
            ))),
        }
    }
}

/// A directed graph with an influence probability on every edge.
///
/// Stored as two CSR arrays. The in-adjacency of each node is sorted by
/// in-neighbor id; that order is the fixed bucket order used by importance
/// sampling. The out-adjacency references in-edge slots so weights live in
/// one place.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilisticGraph {
    node_count: usize,
    model: DiffusionModel,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    in_weights: Vec<f64>,
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    out_slots: Vec<usize>,
}

impl ProbabilisticGraph {
    /// Build and validate a graph from `(u, v, w(u,v))` triples.
    pub fn from_edges(
        node_count: usize,
        mut edges: Vec<(NodeId, NodeId, f64)>,
        model: DiffusionModel,
    ) -> Result<Self> {
        if node_count > NodeId::MAX as usize {
            return Err(SkisError::validation("node count exceeds u32 range"));
        }
        for &(u, v, w) in &edges {
            if u as usize >= node_count || v as usize >= node_count {
                return Err(SkisError::validation(format!(
                    "edge ({u},{v}) references a node outside 0..{node_count}"
                )));
            }
            if u == v {
                return Err(SkisError::validation(format!("self-loop on node {u}")));
            }
            check_weight(u, v, w)?;
        }
        edges.sort_unstable_by_key(|&(u, v, _)| (v, u));
        if let Some(pair) = edges
            .windows(2)
            .find(|p| (p[0].0, p[0].1) == (p[1].0, p[1].1))
        {
            return Err(SkisError::validation(format!(
                "duplicate edge ({},{})",
                pair[0].0, pair[0].1
            )));
        }

        let mut in_offsets = vec![0usize; node_count + 1];
        for &(_, v, _) in &edges {
            in_offsets[v as usize + 1] += 1;
        }
        for i in 0..node_count {
            in_offsets[i + 1] += in_offsets[i];
        }
        let in_sources = edges.iter().map(|e| e.0).collect();
        let in_weights = edges.iter().map(|e| e.2).collect();

        let mut graph = ProbabilisticGraph {
            node_count,
            model,
            in_offsets,
            in_sources,
            in_weights,
            out_offsets: Vec::new(),
            out_targets: Vec::new(),
            out_slots: Vec::new(),
        };
        graph.build_out_adjacency();
        graph.validate()?;
        Ok(graph)
    }

    fn build_out_adjacency(&mut self) {
        let n = self.node_count;
        let mut offsets = vec![0usize; n + 1];
        for &u in &self.in_sources {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let m = self.in_sources.len();
        let mut targets = vec![0; m];
        let mut slots = vec![0; m];
        // Scanning targets in ascending order keeps each out-list sorted.
        for v in 0..n {
            for slot in self.in_offsets[v]..self.in_offsets[v + 1] {
                let u = self.in_sources[slot] as usize;
                targets[cursor[u]] = v as NodeId;
                slots[cursor[u]] = slot;
                cursor[u] += 1;
            }
        }
        self.out_offsets = offsets;
        self.out_targets = targets;
        self.out_slots = slots;
    }

    /// Check every structural and weight invariant.
    pub fn validate(&self) -> Result<()> {
        for v in 0..self.node_count {
            let srcs = self.in_neighbors(v as NodeId);
            if srcs.windows(2).any(|p| p[0] >= p[1]) {
                return Err(SkisError::validation(format!(
                    "in-adjacency of {v} is not strictly sorted"
                )));
            }
            for (&u, &w) in srcs.iter().zip(self.in_weights(v as NodeId)) {
                if u as usize == v {
                    return Err(SkisError::validation(format!("self-loop on node {v}")));
                }
                check_weight(u, v as NodeId, w)?;
            }
            if self.model == DiffusionModel::LT {
                let sum: f64 = self.in_weights(v as NodeId).iter().sum();
                if sum > 1.0 + LT_SUM_TOLERANCE {
                    return Err(SkisError::validation(format!(
                        "LT in-weight sum of node {v} is {sum}, above 1"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.in_sources.len()
    }

    pub fn model(&self) -> DiffusionModel {
        self.model
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        let u = u as usize;
        self.out_offsets[u + 1] - self.out_offsets[u]
    }

    /// In-neighbors of `v`, ascending by id.
    #[inline]
    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    /// Weights aligned with [`in_neighbors`](Self::in_neighbors).
    #[inline]
    pub fn in_weights(&self, v: NodeId) -> &[f64] {
        let v = v as usize;
        &self.in_weights[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    /// Out-neighbors of `u` with edge weights, ascending by target id.
    pub fn out_edges(&self, u: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let u = u as usize;
        let range = self.out_offsets[u]..self.out_offsets[u + 1];
        self.out_targets[range.clone()]
            .iter()
            .zip(&self.out_slots[range])
            .map(move |(&v, &slot)| (v, self.in_weights[slot]))
    }

    /// All edges as `(u, v, w)`, grouped by target then source.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        (0..self.node_count as NodeId).flat_map(move |v| {
            self.in_neighbors(v)
                .iter()
                .zip(self.in_weights(v))
                .map(move |(&u, &w)| (u, v, w))
        })
    }

    /// Overwrite every weight with `1 / d_in(v)`.
    pub fn assign_weighted_cascade(mut self) -> Self {
        for v in 0..self.node_count {
            let range = self.in_offsets[v]..self.in_offsets[v + 1];
            let d = range.len() as f64;
            for w in &mut self.in_weights[range] {
                *w = 1.0 / d;
            }
        }
        self
    }

    /// Overwrite every weight with an independent uniform pick from
    /// {0.1, 0.01, 0.001}.
    pub fn assign_trivalency<R: Rng + ?Sized>(mut self, rng: &mut R) -> Self {
        for w in &mut self.in_weights {
            *w = TRIVALENCY[rng.random_range(0..TRIVALENCY.len())];
        }
        self
    }

    /// Normalize the in-weights of each node and scale them by a fresh
    /// uniform draw `r_v`, so they sum to `r_v`. Nodes whose prior weights
    /// are all zero fall back to `1 / d_in(v)` proportions.
    pub fn assign_lt_random<R: Rng + ?Sized>(mut self, rng: &mut R) -> Self {
        for v in 0..self.node_count {
            let range = self.in_offsets[v]..self.in_offsets[v + 1];
            if range.is_empty() {
                continue;
            }
            let r: f64 = rng.random();
            let weights = &mut self.in_weights[range];
            let sum: f64 = weights.iter().sum();
            if sum > 0.0 {
                for w in weights.iter_mut() {
                    *w = *w / sum * r;
                }
            } else {
                let d = weights.len() as f64;
                for w in weights.iter_mut() {
                    *w = r / d;
                }
            }
        }
        self
    }

    /// FNV-1a over the node count, model and every `(v, u, w)` in CSR order.
    /// Binds sketches to the graph they were built from.
    pub fn content_hash(&self) -> u64 {
        let mut h = FnvHasher::default();
        h.write_u64(self.node_count as u64);
        h.write_u8(self.model.code());
        for (u, v, w) in self.edges() {
            h.write_u32(v);
            h.write_u32(u);
            h.write_u64(w.to_bits());
        }
        h.finish()
    }

    pub fn metadata(&self, weight_mode: WeightMode, seed: u64) -> GraphMetadata {
        GraphMetadata {
            n: self.node_count,
            m: self.edge_count(),
            model: self.model,
            weight_mode,
            seed,
            content_hash: self.content_hash(),
        }
    }

    /// Render as a weighted edge list readable with [`WeightMode::Given`].
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v, w) in self.edges() {
            out.push_str(&format!("{u} {v} {w:?}\n"));
        }
        out
    }
}

fn check_weight(u: NodeId, v: NodeId, w: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&w) {
        return Err(SkisError::validation(format!(
            "weight {w} of edge ({u},{v}) outside [0,1]"
        )));
    }
    Ok(())
}

/// Companion record describing how a graph was loaded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphMetadata {
    pub n: usize,
    pub m: usize,
    pub model: DiffusionModel,
    pub weight_mode: WeightMode,
    pub seed: u64,
    pub content_hash: u64,
}

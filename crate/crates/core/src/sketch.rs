//! Collections of reverse cascades with an inverted node → sample index.

mod codec;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SkisError};
use crate::graph::{DiffusionModel, GammaTable, ProbabilisticGraph};
use crate::rng::RngStream;
use crate::sampler::{SampleKind, Sampler};
use crate::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SketchKind {
    /// Importance samples only (non-singular).
    #[serde(rename = "skis")]
    SKIS,
    /// Plain reverse reachable samples.
    #[serde(rename = "ris")]
    RIS,
}

impl SketchKind {
    pub fn sample_kind(self) -> SampleKind {
        match self {
            SketchKind::SKIS => SampleKind::IIS,
            SketchKind::RIS => SampleKind::RIS,
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            SketchKind::SKIS => 0,
            SketchKind::RIS => 1,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(SketchKind::SKIS),
            1 => Some(SketchKind::RIS),
            _ => None,
        }
    }
}

impl fmt::Display for SketchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SketchKind::SKIS => "skis",
            SketchKind::RIS => "ris",
        })
    }
}

impl FromStr for SketchKind {
    type Err = SkisError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "skis" => Ok(SketchKind::SKIS),
            "ris" => Ok(SketchKind::RIS),
            other => Err(SkisError::validation(format!(
                "unknown sketch kind {other:?}"
            ))),
        }
    }
}

/// When to stop adding samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthPolicy {
    /// Exactly this many samples.
    FixedCount(usize),
    /// Until the summed sample sizes reach this many entries.
    TotalSize(usize),
}

impl GrowthPolicy {
    /// `ceil(h · n · ln n)` total entries (natural log), at least 1.
    pub fn total_size_h(h: f64, n: usize) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(SkisError::validation(format!(
                "h must be positive, got {h}"
            )));
        }
        let n = n as f64;
        let target = (h * n * n.ln()).ceil().max(1.0);
        Ok(GrowthPolicy::TotalSize(target as usize))
    }

    pub fn target(self) -> usize {
        match self {
            GrowthPolicy::FixedCount(t) | GrowthPolicy::TotalSize(t) => t,
        }
    }

    fn validate(self) -> Result<()> {
        if self.target() == 0 {
            return Err(SkisError::validation(
                "growth policy target must be at least 1",
            ));
        }
        Ok(())
    }
}

/// An immutable sketch of `T` samples.
///
/// Samples are stored as sorted node-id runs in one flat array. The inverted
/// index maps each node to the ascending ids of the samples containing it.
/// The per-node `γ_v` values travel with the sketch so that queries need no
/// graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Sketch {
    kind: SketchKind,
    model: DiffusionModel,
    offsets: Vec<usize>,
    entries: Vec<NodeId>,
    gamma: Vec<f64>,
    gamma_total: f64,
    graph_hash: u64,
    index_offsets: Vec<usize>,
    index_ids: Vec<u32>,
}

impl Sketch {
    /// Assemble a sketch from flat sample storage, checking every invariant
    /// and building the inverted index. `offsets` has `T + 1` entries
    /// starting at 0; each run of `entries` must be strictly ascending.
    pub fn from_parts(
        kind: SketchKind,
        model: DiffusionModel,
        offsets: Vec<usize>,
        entries: Vec<NodeId>,
        gamma: Vec<f64>,
        graph_hash: u64,
    ) -> Result<Self> {
        let n = gamma.len();
        if offsets.first() != Some(&0) || offsets.last() != Some(&entries.len()) {
            return Err(SkisError::validation(
                "sample offsets do not span the entries",
            ));
        }
        if offsets.len() - 1 > u32::MAX as usize {
            return Err(SkisError::validation(
                "too many samples for 32-bit sample ids",
            ));
        }
        for pair in offsets.windows(2) {
            if pair[0] > pair[1] {
                return Err(SkisError::validation("sample offsets are not monotone"));
            }
            let run = &entries[pair[0]..pair[1]];
            if run.is_empty() {
                return Err(SkisError::validation("empty sample"));
            }
            if kind == SketchKind::SKIS && run.len() < 2 {
                return Err(SkisError::validation("singular sample in an SKIS sketch"));
            }
            if run.windows(2).any(|p| p[0] >= p[1]) {
                return Err(SkisError::validation("sample nodes not strictly ascending"));
            }
            if run.last().is_some_and(|&v| v as usize >= n) {
                return Err(SkisError::validation(
                    "sample references a node outside the graph",
                ));
            }
        }
        let gamma_total = gamma.iter().sum();
        let (index_offsets, index_ids) = build_index(n, &offsets, &entries);
        Ok(Sketch {
            kind,
            model,
            offsets,
            entries,
            gamma,
            gamma_total,
            graph_hash,
            index_offsets,
            index_ids,
        })
    }

    /// A sketch with no samples.
    pub fn empty(
        kind: SketchKind,
        model: DiffusionModel,
        gamma: Vec<f64>,
        graph_hash: u64,
    ) -> Self {
        Sketch::from_parts(kind, model, vec![0], Vec::new(), gamma, graph_hash)
            .expect("empty sketch is always valid")
    }

    /// Generate samples until `policy` is met.
    ///
    /// Worker `i` draws from stream `i` of `base_seed`. With a fixed count
    /// the count is split evenly and met exactly. With a total-size target
    /// each worker checks the shared entry counter after every sample, so the
    /// final size can overshoot by up to one sample per worker. Per-worker
    /// buffers are concatenated in worker order; one worker is fully
    /// deterministic.
    pub fn build(
        graph: &ProbabilisticGraph,
        gamma: &GammaTable,
        kind: SketchKind,
        policy: GrowthPolicy,
        base_seed: u64,
        worker_count: usize,
    ) -> Result<Self> {
        policy.validate()?;
        if kind == SketchKind::SKIS && !(gamma.total() > 0.0) {
            return Err(SkisError::NoMass);
        }
        if graph.node_count() == 0 {
            return Err(SkisError::validation("cannot sketch an empty graph"));
        }
        if gamma.node_count() != graph.node_count() {
            return Err(SkisError::validation(
                "gamma table does not match the graph",
            ));
        }
        let workers = worker_count.max(1);
        let produced = AtomicUsize::new(0);

        let run_worker = |worker: usize| -> Result<(Vec<usize>, Vec<NodeId>)> {
            let mut rng = RngStream::new(base_seed, worker as u64);
            let mut sampler = Sampler::new(graph, gamma);
            let mut lengths = Vec::new();
            let mut entries = Vec::new();
            let sample_kind = kind.sample_kind();
            let mut push = |entries: &mut Vec<NodeId>, lengths: &mut Vec<usize>| -> Result<usize> {
                let start = entries.len();
                sampler.fill(sample_kind, &mut rng, entries)?;
                entries[start..].sort_unstable();
                lengths.push(entries.len() - start);
                Ok(entries.len() - start)
            };
            match policy {
                GrowthPolicy::FixedCount(target) => {
                    let share = target / workers + usize::from(worker < target % workers);
                    for _ in 0..share {
                        push(&mut entries, &mut lengths)?;
                    }
                }
                GrowthPolicy::TotalSize(target) => {
                    while produced.load(Ordering::Relaxed) < target {
                        let len = push(&mut entries, &mut lengths)?;
                        produced.fetch_add(len, Ordering::Relaxed);
                    }
                }
            }
            Ok((lengths, entries))
        };

        let parts: Vec<Result<(Vec<usize>, Vec<NodeId>)>> = if workers == 1 {
            vec![run_worker(0)]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = (0..workers)
                    .map(|w| {
                        let run = &run_worker;
                        scope.spawn(move || run(w))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("sketch worker panicked"))
                    .collect()
            })
        };

        let mut offsets = vec![0usize];
        let mut entries = Vec::new();
        for part in parts {
            let (lengths, chunk) = part?;
            for len in lengths {
                offsets.push(offsets.last().unwrap() + len);
            }
            entries.extend_from_slice(&chunk);
        }
        Sketch::from_parts(
            kind,
            graph.model(),
            offsets,
            entries,
            gamma.values().to_vec(),
            graph.content_hash(),
        )
    }

    pub fn kind(&self) -> SketchKind {
        self.kind
    }

    pub fn model(&self) -> DiffusionModel {
        self.model
    }

    pub fn node_count(&self) -> usize {
        self.gamma.len()
    }

    /// Number of samples `T`.
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Σ_j |R_j|`.
    pub fn total_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn graph_hash(&self) -> u64 {
        self.graph_hash
    }

    pub fn gamma_total(&self) -> f64 {
        self.gamma_total
    }

    pub fn gamma_values(&self) -> &[f64] {
        &self.gamma
    }

    #[inline]
    pub fn gamma(&self, v: NodeId) -> f64 {
        self.gamma[v as usize]
    }

    /// Nodes of sample `j`, ascending.
    pub fn sample(&self, j: usize) -> &[NodeId] {
        &self.entries[self.offsets[j]..self.offsets[j + 1]]
    }

    pub fn samples(&self) -> impl ExactSizeIterator<Item = &[NodeId]> + '_ {
        self.offsets.windows(2).map(|p| &self.entries[p[0]..p[1]])
    }

    /// Ids of samples containing `v`, ascending.
    #[inline]
    pub fn samples_containing(&self, v: NodeId) -> &[u32] {
        let v = v as usize;
        &self.index_ids[self.index_offsets[v]..self.index_offsets[v + 1]]
    }

    /// Number of singular samples.
    pub fn singular_count(&self) -> usize {
        self.offsets.windows(2).filter(|p| p[1] - p[0] == 1).count()
    }

    /// `C_R(S)`: the number of samples intersecting `seeds`. Ids outside the
    /// graph are ignored; callers validate beforehand.
    pub fn coverage(&self, seeds: &[NodeId]) -> usize {
        match seeds {
            [] => 0,
            [v] => self.samples_containing(*v).len(),
            _ => {
                let mut ids: Vec<u32> = seeds
                    .iter()
                    .filter(|&&v| (v as usize) < self.node_count())
                    .flat_map(|&v| self.samples_containing(v).iter().copied())
                    .collect();
                ids.sort_unstable();
                ids.dedup();
                ids.len()
            }
        }
    }

    /// Concatenate two sketches built from the same graph.
    pub fn merge(&self, other: &Sketch) -> Result<Sketch> {
        if self.graph_hash != other.graph_hash {
            return Err(SkisError::Incompatible(format!(
                "graph hash {:016x} vs {:016x}",
                self.graph_hash, other.graph_hash
            )));
        }
        if self.kind != other.kind || self.model != other.model {
            return Err(SkisError::Incompatible(format!(
                "{}/{} vs {}/{}",
                self.kind, self.model, other.kind, other.model
            )));
        }
        if self.gamma != other.gamma {
            return Err(SkisError::Incompatible(
                "per-node gamma values differ".into(),
            ));
        }
        let base = self.entries.len();
        let mut offsets = self.offsets.clone();
        offsets.extend(other.offsets[1..].iter().map(|o| o + base));
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Sketch::from_parts(
            self.kind,
            self.model,
            offsets,
            entries,
            self.gamma.clone(),
            self.graph_hash,
        )
    }

    /// Approximate heap footprint.
    pub fn memory_bytes(&self) -> usize {
        use std::mem::size_of;
        self.offsets.len() * size_of::<usize>()
            + self.entries.len() * size_of::<NodeId>()
            + self.gamma.len() * size_of::<f64>()
            + self.index_offsets.len() * size_of::<usize>()
            + self.index_ids.len() * size_of::<u32>()
    }

    /// Retag the sketch without checking the sample-size invariant; lets
    /// tests build hand-made sketches containing singular samples.
    #[cfg(test)]
    pub(crate) fn relabel_kind(mut self, kind: SketchKind) -> Self {
        self.kind = kind;
        self
    }

    /// Rebuild the inverted index from the samples and compare.
    pub fn index_is_consistent(&self) -> bool {
        let (offsets, ids) = build_index(self.node_count(), &self.offsets, &self.entries);
        offsets == self.index_offsets && ids == self.index_ids
    }
}

fn build_index(n: usize, offsets: &[usize], entries: &[NodeId]) -> (Vec<usize>, Vec<u32>) {
    let mut index_offsets = vec![0usize; n + 1];
    for &v in entries {
        index_offsets[v as usize + 1] += 1;
    }
    for i in 0..n {
        index_offsets[i + 1] += index_offsets[i];
    }
    let mut cursor = index_offsets.clone();
    let mut ids = vec![0u32; entries.len()];
    for (j, pair) in offsets.windows(2).enumerate() {
        for &v in &entries[pair[0]..pair[1]] {
            ids[cursor[v as usize]] = j as u32;
            cursor[v as usize] += 1;
        }
    }
    (index_offsets, ids)
}

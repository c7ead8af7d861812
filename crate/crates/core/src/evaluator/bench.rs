//! Benchmark drivers.
//!
//! `bench_ie` measures estimation error of sketches against ground truth on
//! random seed sets; `bench_im` compares maximizers at fixed sample budgets.
//! Both produce plain rows that serialize to CSV.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::{exact_influence, monte_carlo_influence_parallel, relative_difference, TruthEstimate};
use crate::error::{Result, SkisError};
use crate::graph::{GammaTable, ProbabilisticGraph};
use crate::maximizer::{dssa, greedy, DssaConfig};
use crate::oracle::estimate_influence;
use crate::rng::RngStream;
use crate::sketch::{GrowthPolicy, Sketch, SketchKind};
use crate::NodeId;

/// Upper edges (percent) of the error histogram bins; the last bin is closed.
pub const HISTOGRAM_EDGES: [f64; 9] = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0, 100.0];

/// Where ground truth comes from.
#[derive(Clone, Debug, PartialEq)]
pub struct TruthConfig {
    /// Try exhaustive enumeration first, falling back to Monte-Carlo when
    /// the instance exceeds the enumeration limits.
    pub allow_exact: bool,
    pub mc_epsilon: f64,
    /// Defaults to `1/n`.
    pub mc_delta: Option<f64>,
}

impl Default for TruthConfig {
    fn default() -> Self {
        TruthConfig {
            allow_exact: true,
            mc_epsilon: 0.005,
            mc_delta: None,
        }
    }
}

impl TruthConfig {
    pub fn monte_carlo(epsilon: f64, delta: Option<f64>) -> Self {
        TruthConfig {
            allow_exact: false,
            mc_epsilon: epsilon,
            mc_delta: delta,
        }
    }

    fn delta_for(&self, n: usize) -> f64 {
        self.mc_delta.unwrap_or_else(|| default_delta(n))
    }
}

/// `1/n`, capped at 1/4 since `1/n` is not a usable confidence level on
/// one- and two-node graphs.
pub fn default_delta(n: usize) -> f64 {
    (1.0 / n as f64).min(0.25)
}

/// Influence of `seeds` under `truth`, with Monte-Carlo randomness drawn
/// from `seed`.
pub fn ground_truth(
    graph: &ProbabilisticGraph,
    seeds: &[NodeId],
    truth: &TruthConfig,
    seed: u64,
    workers: usize,
) -> Result<TruthEstimate> {
    if truth.allow_exact {
        match exact_influence(graph, seeds) {
            Err(SkisError::TooLarge { .. }) => {}
            other => return other,
        }
    }
    let delta = truth.delta_for(graph.node_count());
    monte_carlo_influence_parallel(graph, seeds, truth.mc_epsilon, delta, seed, workers)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IeRecord {
    Query,
    Aggregate,
    Histogram,
}

/// One CSV row of `bench_ie`. Fields that do not apply to a record type
/// are left empty.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IeRow {
    pub record: IeRecord,
    pub method: SketchKind,
    pub h: f64,
    pub seed_set_size: usize,
    /// Samples in the sketch.
    pub samples: usize,
    pub query: Option<usize>,
    pub estimate: Option<f64>,
    pub truth: Option<f64>,
    /// Per-query error, or the mean over queries for aggregate rows.
    pub rel_diff_pct: Option<f64>,
    pub bin_lower_pct: Option<f64>,
    pub bin_upper_pct: Option<f64>,
    /// Queries aggregated, or queries falling in the bin.
    pub count: Option<usize>,
}

pub const IE_HEADER: [&str; 12] = [
    "record",
    "method",
    "h",
    "seed_set_size",
    "samples",
    "query",
    "estimate",
    "truth",
    "rel_diff_pct",
    "bin_lower_pct",
    "bin_upper_pct",
    "count",
];

#[derive(Clone, Debug, PartialEq)]
pub struct IeConfig {
    /// Sketch sizes as multiples of `n ln n` total entries.
    pub hs: Vec<f64>,
    pub kinds: Vec<SketchKind>,
    /// Sizes above `n` are clamped to `n`.
    pub seed_set_sizes: Vec<usize>,
    pub query_count: usize,
    pub truth: TruthConfig,
    pub seed: u64,
    pub workers: usize,
}

impl IeConfig {
    pub fn new(hs: Vec<f64>, query_count: usize, seed: u64) -> Self {
        IeConfig {
            hs,
            kinds: vec![SketchKind::SKIS, SketchKind::RIS],
            seed_set_sizes: vec![1, 100, 1000],
            query_count,
            truth: TruthConfig::default(),
            seed,
            workers: 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IeReport {
    pub rows: Vec<IeRow>,
}

impl IeReport {
    pub fn aggregate(&self, method: SketchKind, h: f64, seed_set_size: usize) -> Option<&IeRow> {
        self.rows.iter().find(|r| {
            r.record == IeRecord::Aggregate
                && r.method == method
                && r.h == h
                && r.seed_set_size == seed_set_size
        })
    }

    pub fn queries(&self) -> impl Iterator<Item = &IeRow> + '_ {
        self.rows.iter().filter(|r| r.record == IeRecord::Query)
    }

    /// Long-format CSV; always starts with the header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(IE_HEADER).map_err(csv_error)?;
        for row in &self.rows {
            w.serialize(row).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Mean error per (method, seed-set size) with one `h(..)` column per
    /// sketch size.
    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut hs: Vec<f64> = Vec::new();
        let mut keys: Vec<(SketchKind, usize)> = Vec::new();
        for r in self.rows.iter().filter(|r| r.record == IeRecord::Aggregate) {
            if !hs.contains(&r.h) {
                hs.push(r.h);
            }
            if !keys.contains(&(r.method, r.seed_set_size)) {
                keys.push((r.method, r.seed_set_size));
            }
        }
        let mut w = csv_writer(out);
        let mut header = vec!["method".to_string(), "seed_set_size".to_string()];
        header.extend(hs.iter().map(|h| format!("h({h})")));
        w.write_record(&header).map_err(csv_error)?;
        for (method, size) in keys {
            let mut record = vec![method.to_string(), size.to_string()];
            for &h in &hs {
                let cell = self
                    .aggregate(method, h, size)
                    .and_then(|r| r.rel_diff_pct)
                    .map(|v| v.to_string())
                    .unwrap_or_default();
                record.push(cell);
            }
            w.write_record(&record).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Estimation-error benchmark.
///
/// The same random seed sets and truth values are shared by every sketch
/// configuration so methods are compared on identical queries.
pub fn bench_ie(graph: &ProbabilisticGraph, config: &IeConfig) -> Result<IeReport> {
    let n = graph.node_count();
    if n == 0 {
        return Err(SkisError::validation("graph has no nodes"));
    }
    for &h in &config.hs {
        if !(h > 0.0 && h.is_finite()) {
            return Err(SkisError::validation(format!(
                "h must be positive, got {h}"
            )));
        }
    }
    let mut report = IeReport::default();
    if config.query_count == 0 {
        return Ok(report);
    }

    let mut query_rng = RngStream::new(config.seed, 0);
    let mut queries: Vec<(usize, Vec<Vec<NodeId>>, Vec<f64>)> = Vec::new();
    let mut truth_index = 0u64;
    for &size in &config.seed_set_sizes {
        let size = size.clamp(1, n);
        let mut sets = Vec::with_capacity(config.query_count);
        let mut truths = Vec::with_capacity(config.query_count);
        for _ in 0..config.query_count {
            let mut set: Vec<NodeId> = index::sample(&mut query_rng, n, size)
                .into_iter()
                .map(|v| v as NodeId)
                .collect();
            set.sort_unstable();
            let truth_seed = RngStream::derive_seed(config.seed, 1 << 32 | truth_index);
            truth_index += 1;
            truths
                .push(ground_truth(graph, &set, &config.truth, truth_seed, config.workers)?.value);
            sets.push(set);
        }
        queries.push((size, sets, truths));
    }

    let gamma = GammaTable::compute(graph);
    for (hi, &h) in config.hs.iter().enumerate() {
        let policy = GrowthPolicy::total_size_h(h, n)?;
        for (ki, &kind) in config.kinds.iter().enumerate() {
            let build_seed =
                RngStream::derive_seed(config.seed, (hi * config.kinds.len() + ki) as u64 + 1);
            let sketch = Sketch::build(graph, &gamma, kind, policy, build_seed, config.workers)?;
            for (size, sets, truths) in &queries {
                let mut errors = Vec::with_capacity(sets.len());
                for (q, (set, &truth)) in sets.iter().zip(truths).enumerate() {
                    let estimate = estimate_influence(&sketch, set)?.value;
                    let err = relative_difference(estimate, truth);
                    errors.push(err);
                    report.rows.push(IeRow {
                        record: IeRecord::Query,
                        method: kind,
                        h,
                        seed_set_size: *size,
                        samples: sketch.len(),
                        query: Some(q),
                        estimate: Some(estimate),
                        truth: Some(truth),
                        rel_diff_pct: Some(err),
                        bin_lower_pct: None,
                        bin_upper_pct: None,
                        count: None,
                    });
                }
                let mean = errors.iter().sum::<f64>() / errors.len() as f64;
                report.rows.push(IeRow {
                    record: IeRecord::Aggregate,
                    method: kind,
                    h,
                    seed_set_size: *size,
                    samples: sketch.len(),
                    query: None,
                    estimate: None,
                    truth: None,
                    rel_diff_pct: Some(mean),
                    bin_lower_pct: None,
                    bin_upper_pct: None,
                    count: Some(errors.len()),
                });
                for (lo, hi_edge, count) in histogram(&errors) {
                    report.rows.push(IeRow {
                        record: IeRecord::Histogram,
                        method: kind,
                        h,
                        seed_set_size: *size,
                        samples: sketch.len(),
                        query: None,
                        estimate: None,
                        truth: None,
                        rel_diff_pct: None,
                        bin_lower_pct: Some(lo),
                        bin_upper_pct: Some(hi_edge),
                        count: Some(count),
                    });
                }
            }
        }
    }
    Ok(report)
}

fn histogram(errors: &[f64]) -> Vec<(f64, f64, usize)> {
    let bins = HISTOGRAM_EDGES.len() - 1;
    let mut counts = vec![0usize; bins];
    for &e in errors {
        let slot = HISTOGRAM_EDGES[1..]
            .iter()
            .position(|&upper| e < upper)
            .unwrap_or(bins - 1);
        counts[slot] += 1;
    }
    (0..bins)
        .map(|i| (HISTOGRAM_EDGES[i], HISTOGRAM_EDGES[i + 1], counts[i]))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ImAlgorithm {
    #[serde(rename = "GREEDY_SKIS")]
    GreedySkis,
    #[serde(rename = "GREEDY_RIS")]
    GreedyRis,
    #[serde(rename = "DSSA_SKIS")]
    DssaSkis,
}

impl ImAlgorithm {
    pub const ALL: [ImAlgorithm; 3] = [
        ImAlgorithm::GreedySkis,
        ImAlgorithm::GreedyRis,
        ImAlgorithm::DssaSkis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ImAlgorithm::GreedySkis => "GREEDY_SKIS",
            ImAlgorithm::GreedyRis => "GREEDY_RIS",
            ImAlgorithm::DssaSkis => "DSSA_SKIS",
        }
    }
}

impl fmt::Display for ImAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ImAlgorithm {
    type Err = SkisError;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.to_ascii_uppercase().replace('-', "_");
        ImAlgorithm::ALL
            .into_iter()
            .find(|a| a.name() == upper)
            .ok_or_else(|| SkisError::validation(format!("unknown algorithm '{s}'")))
    }
}

/// One CSV row of `bench_im`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImRow {
    pub algorithm: ImAlgorithm,
    pub k: usize,
    /// Fixed sketch size; empty for DSSA, which sizes its own sketches.
    pub budget: Option<usize>,
    pub trial: usize,
    pub influence: f64,
    pub runtime_s: f64,
    /// Sketch footprint; empty for DSSA.
    pub memory_bytes: Option<usize>,
    pub samples: usize,
    /// Space-separated, in selection order.
    pub seeds: String,
}

pub const IM_HEADER: [&str; 9] = [
    "algorithm",
    "k",
    "budget",
    "trial",
    "influence",
    "runtime_s",
    "memory_bytes",
    "samples",
    "seeds",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ImConfig {
    pub k_values: Vec<usize>,
    pub algorithms: Vec<ImAlgorithm>,
    pub budgets: Vec<usize>,
    pub trials: usize,
    /// Evaluation of the returned seed sets.
    pub truth: TruthConfig,
    pub dssa_epsilon: f64,
    /// Defaults to `1/n`.
    pub dssa_delta: Option<f64>,
    pub seed: u64,
    pub workers: usize,
}

impl ImConfig {
    pub fn new(k_values: Vec<usize>, budgets: Vec<usize>, trials: usize, seed: u64) -> Self {
        ImConfig {
            k_values,
            algorithms: ImAlgorithm::ALL.to_vec(),
            budgets,
            trials,
            truth: TruthConfig::monte_carlo(0.005, None),
            dssa_epsilon: 0.5,
            dssa_delta: None,
            seed,
            workers: 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ImReport {
    pub rows: Vec<ImRow>,
}

impl ImReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(IM_HEADER).map_err(csv_error)?;
        for row in &self.rows {
            w.serialize(row).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn find(
        &self,
        algorithm: ImAlgorithm,
        k: usize,
        budget: Option<usize>,
        trial: usize,
    ) -> Option<&ImRow> {
        self.rows.iter().find(|r| {
            r.algorithm == algorithm && r.k == k && r.budget == budget && r.trial == trial
        })
    }
}

/// Maximization benchmark.
///
/// Within a trial every returned seed set is evaluated with the same
/// Monte-Carlo stream, so differences between algorithms are not masked by
/// evaluation noise.
pub fn bench_im(graph: &ProbabilisticGraph, config: &ImConfig) -> Result<ImReport> {
    let n = graph.node_count();
    if let Some(&k) = config.k_values.iter().find(|&&k| k == 0 || k > n) {
        return Err(SkisError::validation(format!(
            "k must lie in 1..={n}, got {k}"
        )));
    }
    if config.budgets.contains(&0) {
        return Err(SkisError::validation("sample budgets must be positive"));
    }
    let gamma = GammaTable::compute(graph);
    let mut report = ImReport::default();
    let dssa_delta = config.dssa_delta.unwrap_or_else(|| default_delta(n));

    for trial in 0..config.trials {
        let trial_seed = RngStream::derive_seed(config.seed, trial as u64);
        let eval_seed = RngStream::derive_seed(trial_seed, 0);
        let evaluate = |seeds: &[NodeId]| -> Result<f64> {
            Ok(ground_truth(graph, seeds, &config.truth, eval_seed, config.workers)?.value)
        };

        for &budget in &config.budgets {
            for &algorithm in &config.algorithms {
                let kind = match algorithm {
                    ImAlgorithm::GreedySkis => SketchKind::SKIS,
                    ImAlgorithm::GreedyRis => SketchKind::RIS,
                    ImAlgorithm::DssaSkis => continue,
                };
                let build_seed = RngStream::derive_seed(trial_seed, 1 + budget as u64);
                let started = Instant::now();
                let sketch = Sketch::build(
                    graph,
                    &gamma,
                    kind,
                    GrowthPolicy::FixedCount(budget),
                    build_seed,
                    config.workers,
                )?;
                let build_time = started.elapsed().as_secs_f64();
                for &k in &config.k_values {
                    let started = Instant::now();
                    let solution = greedy(&sketch, k)?;
                    let runtime_s = build_time + started.elapsed().as_secs_f64();
                    report.rows.push(ImRow {
                        algorithm,
                        k,
                        budget: Some(budget),
                        trial,
                        influence: evaluate(&solution.seeds)?,
                        runtime_s,
                        memory_bytes: Some(sketch.memory_bytes()),
                        samples: sketch.len(),
                        seeds: join_seeds(&solution.seeds),
                    });
                }
            }
        }

        if config.algorithms.contains(&ImAlgorithm::DssaSkis) {
            for &k in &config.k_values {
                let mut dssa_config = DssaConfig::new(
                    k,
                    config.dssa_epsilon,
                    dssa_delta,
                    RngStream::derive_seed(trial_seed, u64::MAX),
                );
                dssa_config.workers = config.workers;
                let started = Instant::now();
                let outcome = dssa(graph, &gamma, &dssa_config)?;
                let runtime_s = started.elapsed().as_secs_f64();
                report.rows.push(ImRow {
                    algorithm: ImAlgorithm::DssaSkis,
                    k,
                    budget: None,
                    trial,
                    influence: evaluate(&outcome.seeds)?,
                    runtime_s,
                    memory_bytes: None,
                    samples: outcome.samples_used,
                    seeds: join_seeds(&outcome.seeds),
                });
            }
        }
    }
    Ok(report)
}

fn join_seeds(seeds: &[NodeId]) -> String {
    seeds
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn csv_error(e: csv::Error) -> SkisError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => SkisError::Io(io),
        other => SkisError::Format(format!("csv: {other:?}")),
    }
}

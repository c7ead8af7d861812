#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Importance sketching of reverse influence cascades.
//!
//! The crate builds sketches of non-singular reverse cascades (IIS samples)
//! over probabilistic graphs under the Independent Cascade and Linear
//! Threshold models, answers influence queries from them, and drives greedy
//! and stop-and-stare influence maximization on top. Plain reverse
//! reachable (RIS) sketches are supported alongside for comparison, and the
//! [`evaluator`] module provides exact and Monte-Carlo ground truth.

pub mod error;
pub mod evaluator;
pub mod fixtures;
pub mod graph;
pub mod maximizer;
pub mod oracle;
pub mod rng;
pub mod sampler;
pub mod sketch;

pub use error::{Result, SkisError};
pub use evaluator::{TruthEstimate, TruthMethod};
pub use graph::{DiffusionModel, GammaTable, GraphMetadata, ProbabilisticGraph, WeightMode};
pub use maximizer::{DssaConfig, DssaOutcome, GreedySolution};
pub use oracle::{Estimate, QueryRecord, VarianceReport};
pub use rng::RngStream;
pub use sampler::{Sample, SampleKind, Sampler};
pub use sketch::{GrowthPolicy, Sketch, SketchKind};

/// Node identifier. Graphs are limited to `u32::MAX` nodes.
pub type NodeId = u32;

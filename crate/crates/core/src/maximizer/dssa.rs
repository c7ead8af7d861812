//! Stop-and-stare driver with dynamically computed error bounds.
//!
//! Two independent sketches `R` and `Rc` double in size every iteration.
//! Greedy on `R` proposes a seed set; `Rc` re-estimates it. The loop stops
//! once the candidate covers at least `Λ2` samples of `R` and the combined
//! error `(ε1 + ε2 + ε1ε2)(1 - 1/e - ε) + (1 - 1/e)ε3` is at most `ε`, or
//! when `R` reaches the sample cap.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use super::{greedy, theta_ris, theta_skis};
use crate::error::{Result, SkisError};
use crate::graph::{GammaTable, ProbabilisticGraph};
use crate::oracle::estimate_influence;
use crate::rng::RngStream;
use crate::sketch::{GrowthPolicy, Sketch, SketchKind};
use crate::NodeId;

/// Smallest initial sketch size.
const MIN_INITIAL_SAMPLES: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct DssaConfig {
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub workers: usize,
    /// SKIS normally; RIS runs the same driver on plain reverse samples.
    pub kind: SketchKind,
    /// Replaces the derived `Λ2` coverage threshold.
    pub lambda2_override: Option<f64>,
}

impl DssaConfig {
    pub fn new(k: usize, epsilon: f64, delta: f64, seed: u64) -> Self {
        DssaConfig {
            k,
            epsilon,
            delta,
            seed,
            workers: 1,
            kind: SketchKind::SKIS,
            lambda2_override: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GuaranteeFlag {
    #[serde(rename = "met")]
    Met,
    #[serde(rename = "guarantee-capped")]
    Capped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DssaOutcome {
    pub seeds: Vec<NodeId>,
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// Samples generated across both sketches.
    pub samples_used: usize,
    pub iterations: usize,
    /// Estimate of the returned set on `R`.
    pub objective: f64,
    #[serde(rename = "guarantee_flag")]
    pub guarantee: GuaranteeFlag,
}

/// Derived thresholds for one run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DssaSchedule {
    pub max_samples: usize,
    pub t_max: usize,
    pub lambda2: f64,
    pub initial: usize,
}

/// `Λ2 = (2Γ/n + 2ε/3) · ln(3 t_max / δ) · ε⁻²`; `t_max` doubles the
/// initial size up to the cap `θ` computed with `OPT ≥ k`.
pub fn schedule(n: usize, gamma_total: f64, config: &DssaConfig) -> Result<DssaSchedule> {
    let DssaConfig {
        k, epsilon, delta, ..
    } = *config;
    let ratio = match config.kind {
        SketchKind::SKIS => gamma_total / n as f64,
        SketchKind::RIS => 1.0,
    };
    let max_samples = match config.kind {
        SketchKind::SKIS => theta_skis(n, k, epsilon, delta, gamma_total, k as f64)?,
        SketchKind::RIS => theta_ris(n, k, epsilon, delta, k as f64)?,
    } as usize;
    let coeff = (2.0 * ratio + 2.0 * epsilon / 3.0) / (epsilon * epsilon);
    let base = (coeff * (3.0 / delta).ln()).max(MIN_INITIAL_SAMPLES as f64);
    let t_max = ((max_samples as f64 / base).log2().ceil() as usize).max(1);
    let lambda2 = config
        .lambda2_override
        .unwrap_or_else(|| coeff * (3.0 * t_max as f64 / delta).ln());
    let initial = (lambda2.ceil() as usize).max(MIN_INITIAL_SAMPLES);
    Ok(DssaSchedule {
        max_samples: max_samples.max(initial),
        t_max,
        lambda2,
        initial,
    })
}

pub fn dssa(
    graph: &ProbabilisticGraph,
    gamma: &GammaTable,
    config: &DssaConfig,
) -> Result<DssaOutcome> {
    let n = graph.node_count();
    let DssaConfig {
        k, epsilon, delta, ..
    } = *config;
    let ceiling = 1.0 - 1.0 / E;
    if !(epsilon > 0.0 && epsilon < ceiling) {
        return Err(SkisError::validation(format!(
            "epsilon must lie in (0, 1-1/e), got {epsilon}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(SkisError::validation(format!(
            "delta must lie in (0,1), got {delta}"
        )));
    }
    if k == 0 || k > n {
        return Err(SkisError::validation(format!(
            "k must lie in 1..={n}, got {k}"
        )));
    }
    let plan = schedule(n, gamma.total(), config)?;
    let n_f = n as f64;

    let empty = || {
        Sketch::empty(
            config.kind,
            graph.model(),
            gamma.values().to_vec(),
            graph.content_hash(),
        )
    };
    let mut main = empty();
    let mut check = empty();
    let mut iteration = 0usize;
    loop {
        iteration += 1;
        let target = plan
            .initial
            .saturating_mul(1usize << (iteration - 1).min(62));
        for (sketch, side) in [(&mut main, 0u64), (&mut check, 1u64)] {
            let missing = target - sketch.len();
            if missing > 0 {
                let seed = RngStream::derive_seed(config.seed, 2 * iteration as u64 + side);
                let extra = Sketch::build(
                    graph,
                    gamma,
                    config.kind,
                    GrowthPolicy::FixedCount(missing),
                    seed,
                    config.workers,
                )?;
                *sketch = sketch.merge(&extra)?;
            }
        }

        let candidate = greedy(&main, k)?;
        let on_main = candidate.objective;
        let on_check = estimate_influence(&check, &candidate.seeds)?.value;
        let scale = (1u64 << (iteration - 1).min(62)) as f64;

        if on_check > 0.0 && candidate.coverage as f64 >= plan.lambda2 {
            let eps1 = on_main / on_check - 1.0;
            let eps2 = epsilon * (n_f * (1.0 + epsilon) / (scale * on_check)).sqrt();
            let eps3 = epsilon
                * (n_f * (1.0 + epsilon) * (ceiling - epsilon)
                    / ((1.0 + epsilon / 3.0) * scale * on_check))
                    .sqrt();
            let combined = (eps1 + eps2 + eps1 * eps2) * (ceiling - epsilon) + ceiling * eps3;
            if combined <= epsilon {
                return Ok(outcome(
                    candidate.seeds,
                    config,
                    &main,
                    &check,
                    iteration,
                    on_main,
                    GuaranteeFlag::Met,
                ));
            }
        }
        if main.len() >= plan.max_samples {
            return Ok(outcome(
                candidate.seeds,
                config,
                &main,
                &check,
                iteration,
                on_main,
                GuaranteeFlag::Capped,
            ));
        }
    }
}

fn outcome(
    seeds: Vec<NodeId>,
    config: &DssaConfig,
    main: &Sketch,
    check: &Sketch,
    iterations: usize,
    objective: f64,
    guarantee: GuaranteeFlag,
) -> DssaOutcome {
    DssaOutcome {
        seeds,
        k: config.k,
        epsilon: config.epsilon,
        delta: config.delta,
        samples_used: main.len() + check.len(),
        iterations,
        objective,
        guarantee,
    }
}

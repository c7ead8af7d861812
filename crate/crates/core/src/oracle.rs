//! Influence queries over a sketch, plus sample-size, variance and tail
//! calculators.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SkisError};
use crate::graph::{GammaTable, ProbabilisticGraph};
use crate::sketch::{Sketch, SketchKind};
use crate::NodeId;

/// An influence estimate for one seed set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    /// Estimated expected number of activated nodes.
    pub value: f64,
    pub coverage: usize,
    pub samples: usize,
    pub kind: SketchKind,
    /// `Σ_{v∈S} (1 - γ_v)` for SKIS, zero for RIS.
    pub additive_term: f64,
}

/// One JSON output record of an estimate query.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub seed_set: Vec<NodeId>,
    pub estimate: f64,
    pub coverage: usize,
    #[serde(rename = "T")]
    pub samples: usize,
    pub kind: SketchKind,
    pub additive_term: f64,
}

impl QueryRecord {
    pub fn new(seed_set: Vec<NodeId>, estimate: &Estimate) -> Self {
        QueryRecord {
            seed_set,
            estimate: estimate.value,
            coverage: estimate.coverage,
            samples: estimate.samples,
            kind: estimate.kind,
            additive_term: estimate.additive_term,
        }
    }
}

/// Sort, dedupe and range-check a seed set against `n` nodes.
pub fn normalize_seeds(seeds: &[NodeId], n: usize) -> Result<Vec<NodeId>> {
    if let Some(&bad) = seeds.iter().find(|&&v| v as usize >= n) {
        return Err(SkisError::validation(format!(
            "node {bad} is not in the graph (n = {n})"
        )));
    }
    let mut out = seeds.to_vec();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// `Σ_{v∈S} (1 - γ_v)`: the influence that singular cascades contribute.
pub fn singular_mass(sketch: &Sketch, seeds: &[NodeId]) -> f64 {
    seeds.iter().map(|&v| 1.0 - sketch.gamma(v)).sum()
}

/// Estimate `I(S)`.
///
/// SKIS: `C_R(S)/T · Γ + Σ_{v∈S}(1 - γ_v)`. RIS: `C_R(S)/T · n`.
pub fn estimate_influence(sketch: &Sketch, seeds: &[NodeId]) -> Result<Estimate> {
    if sketch.is_empty() {
        return Err(SkisError::NoSamples);
    }
    if seeds.is_empty() {
        return Err(SkisError::validation("seed set is empty"));
    }
    let seeds = normalize_seeds(seeds, sketch.node_count())?;
    let coverage = sketch.coverage(&seeds);
    let fraction = coverage as f64 / sketch.len() as f64;
    let (value, additive_term) = match sketch.kind() {
        SketchKind::SKIS => {
            let additive = singular_mass(sketch, &seeds);
            (fraction * sketch.gamma_total() + additive, additive)
        }
        SketchKind::RIS => (fraction * sketch.node_count() as f64, 0.0),
    };
    Ok(Estimate {
        value,
        coverage,
        samples: sketch.len(),
        kind: sketch.kind(),
        additive_term,
    })
}

/// Samples needed for an `(ε, δ)`-estimate of a set whose influence is at
/// least `influence_lower_bound`:
/// `ceil((2Γ/n + 2ε/3) · ln(2/δ) · n / lb · ε⁻²)`.
pub fn required_samples(
    gamma_total: f64,
    n: usize,
    influence_lower_bound: f64,
    epsilon: f64,
    delta: f64,
) -> Result<u64> {
    if n == 0 {
        return Err(SkisError::validation("n must be positive"));
    }
    if !(epsilon > 0.0) {
        return Err(SkisError::validation("epsilon must be positive"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(SkisError::validation("delta must lie in (0,1)"));
    }
    if !(influence_lower_bound >= 1.0) {
        return Err(SkisError::validation(
            "influence lower bound must be at least 1",
        ));
    }
    if !(gamma_total >= 0.0) {
        return Err(SkisError::validation("Gamma must be nonnegative"));
    }
    let n_f = n as f64;
    let coeff = 2.0 * gamma_total / n_f + 2.0 * epsilon / 3.0;
    let t = coeff * (2.0 / delta).ln() * (n_f / influence_lower_bound) / (epsilon * epsilon);
    Ok(t.ceil() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailSide {
    Upper,
    Lower,
}

/// Bound on `Pr[Î - I ≥ εI]` (upper) or `Pr[Î - I ≤ -εI]` (lower) for a
/// sketch of `t` importance samples.
pub fn concentration_tail(
    t: f64,
    epsilon: f64,
    gamma_over_n: f64,
    influence_over_n: f64,
    side: TailSide,
) -> f64 {
    let denom = match side {
        TailSide::Upper => 2.0 * gamma_over_n + 2.0 * epsilon / 3.0,
        TailSide::Lower => 2.0 * gamma_over_n,
    };
    (-(epsilon * epsilon) * t / denom * influence_over_n).exp()
}

/// Exact, bounded and empirical per-sample variances of the SKIS and RIS
/// estimators for one seed set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceReport {
    /// `Var[Z_j(S)]` from the closed form; clamped at 0.
    pub var_z_exact: f64,
    /// Set when the closed form came out negative through rounding.
    pub var_z_clamped: bool,
    /// `(I/n) · (Γ/n)`.
    pub var_z_bound: f64,
    /// `(I/n) · (1 - I/n)`.
    pub var_y: f64,
    pub empirical_var_z: f64,
    pub empirical_var_y: f64,
}

/// Closed-form variance of the scaled SKIS variable
/// `Z = (X·Γ + A)/n` where `A = Σ_{v∈S}(1-γ_v)`:
/// `(I/n)(Γ/n) - I²/n² - A(Γ + A - 2I)/n²`. Not clamped.
pub fn skis_variance(influence: f64, gamma_total: f64, additive: f64, n: f64) -> f64 {
    influence / n * gamma_total / n
        - influence * influence / (n * n)
        - additive / (n * n) * (gamma_total + additive - 2.0 * influence)
}

pub fn variance_report(
    graph: &ProbabilisticGraph,
    gamma: &GammaTable,
    seeds: &[NodeId],
    true_influence: f64,
    skis: &Sketch,
    ris: &Sketch,
) -> Result<VarianceReport> {
    let n = graph.node_count();
    let seeds = normalize_seeds(seeds, n)?;
    if skis.kind() != SketchKind::SKIS || ris.kind() != SketchKind::RIS {
        return Err(SkisError::validation(
            "variance report needs one SKIS and one RIS sketch",
        ));
    }
    let n_f = n as f64;
    let gamma_total = gamma.total();
    let additive: f64 = seeds.iter().map(|&v| 1.0 - gamma.gamma(v)).sum();
    let raw = skis_variance(true_influence, gamma_total, additive, n_f);
    let p = true_influence / n_f;

    let z_stream =
        indicator_stream(skis, &seeds).map(|x| (f64::from(x) * gamma_total + additive) / n_f);
    let y_stream = indicator_stream(ris, &seeds).map(f64::from);

    Ok(VarianceReport {
        var_z_exact: raw.max(0.0),
        var_z_clamped: raw < 0.0,
        var_z_bound: p * (gamma_total / n_f),
        var_y: p * (1.0 - p),
        empirical_var_z: sample_variance(z_stream),
        empirical_var_y: sample_variance(y_stream),
    })
}

/// `X_j(S)` for every sample in order.
fn indicator_stream<'a>(sketch: &'a Sketch, seeds: &[NodeId]) -> impl Iterator<Item = u8> + 'a {
    let mut hit = vec![0u8; sketch.len()];
    for &v in seeds {
        for &j in sketch.samples_containing(v) {
            hit[j as usize] = 1;
        }
    }
    hit.into_iter()
}

/// Unbiased sample variance (Welford).
fn sample_variance(values: impl Iterator<Item = f64>) -> f64 {
    let (mut count, mut mean, mut m2) = (0usize, 0.0, 0.0);
    for x in values {
        count += 1;
        let delta = x - mean;
        mean += delta / count as f64;
        m2 += delta * (x - mean);
    }
    if count < 2 {
        0.0
    } else {
        m2 / (count - 1) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DiffusionModel;
    use crate::sketch::GrowthPolicy;

    fn setup(n: usize, edges: &[(u32, u32, f64)]) -> (ProbabilisticGraph, GammaTable) {
        let g = ProbabilisticGraph::from_edges(n, edges.to_vec(), DiffusionModel::IC).unwrap();
        let t = GammaTable::compute(&g);
        (g, t)
    }

    #[test]
    fn single_edge_exact_for_any_t() {
        let (g, t) = setup(2, &[(0, 1, 0.5)]);
        for count in [1, 7, 100] {
            let s = Sketch::build(
                &g,
                &t,
                SketchKind::SKIS,
                GrowthPolicy::FixedCount(count),
                3,
                1,
            )
            .unwrap();
            assert_eq!(estimate_influence(&s, &[0]).unwrap().value, 1.5);
            assert_eq!(estimate_influence(&s, &[1]).unwrap().value, 1.0);
        }
    }

    #[test]
    fn errors() {
        let (g, t) = setup(2, &[(0, 1, 0.5)]);
        let empty = Sketch::empty(SketchKind::SKIS, DiffusionModel::IC, t.values().to_vec(), 0);
        assert!(matches!(
            estimate_influence(&empty, &[0]),
            Err(SkisError::NoSamples)
        ));
        let s = Sketch::build(&g, &t, SketchKind::SKIS, GrowthPolicy::FixedCount(3), 3, 1).unwrap();
        assert!(matches!(
            estimate_influence(&s, &[]),
            Err(SkisError::Validation(_))
        ));
        assert!(matches!(
            estimate_influence(&s, &[2]),
            Err(SkisError::Validation(_))
        ));
    }

    #[test]
    fn duplicate_seeds_do_not_double_count() {
        let (g, t) = setup(2, &[(0, 1, 0.5)]);
        let s = Sketch::build(&g, &t, SketchKind::SKIS, GrowthPolicy::FixedCount(3), 3, 1).unwrap();
        assert_eq!(
            estimate_influence(&s, &[0, 0]).unwrap(),
            estimate_influence(&s, &[0]).unwrap()
        );
    }

    #[test]
    fn ris_scales_by_n() {
        let (g, t) = setup(2, &[(0, 1, 0.5)]);
        let s = Sketch::build(&g, &t, SketchKind::RIS, GrowthPolicy::FixedCount(10), 3, 1).unwrap();
        let e = estimate_influence(&s, &[0, 1]).unwrap();
        assert_eq!(e.value, 2.0);
        assert_eq!(e.additive_term, 0.0);
    }

    #[test]
    fn required_samples_reference_value() {
        // independently: (0.4 + 0.0666…) · ln 200 · 1000 · 100 = 247254.81…
        assert_eq!(
            required_samples(200.0, 1000, 1.0, 0.1, 0.01).unwrap(),
            247_255
        );
    }

    #[test]
    fn required_samples_scaling() {
        let a = required_samples(200.0, 1000, 1.0, 0.1, 0.01).unwrap() as f64;
        let b = required_samples(200.0, 1000, 2.0, 0.1, 0.01).unwrap() as f64;
        assert!((a / 2.0 - b).abs() <= 1.0);
        // Γ = n gives the 2 + 2ε/3 coefficient
        let full = required_samples(1000.0, 1000, 1.0, 0.1, 0.01).unwrap() as f64;
        let expect = (2.0 + 0.2 / 3.0) * 200f64.ln() * 1000.0 * 100.0;
        assert!((full - expect.ceil()).abs() < 1.0);
    }

    #[test]
    fn required_samples_validation() {
        assert!(required_samples(1.0, 10, 1.0, 0.0, 0.1).is_err());
        assert!(required_samples(1.0, 10, 1.0, 0.1, 1.0).is_err());
        assert!(required_samples(1.0, 10, 0.5, 0.1, 0.1).is_err());
        assert!(required_samples(1.0, 0, 1.0, 0.1, 0.1).is_err());
    }

    #[test]
    fn tails_meet_delta_at_required_size() {
        for (gn, inf_n, eps, delta) in [
            (0.2, 0.01, 0.1, 0.01),
            (0.9, 0.3, 0.05, 0.2),
            (1.0, 0.001, 0.5, 1e-3),
        ] {
            let n = 1000;
            let t =
                required_samples(gn * n as f64, n, inf_n * n as f64, eps, delta).unwrap() as f64;
            let up = concentration_tail(t, eps, gn, inf_n, TailSide::Upper);
            let lo = concentration_tail(t, eps, gn, inf_n, TailSide::Lower);
            assert!(up + lo <= delta * (1.0 + 1e-12), "{up} + {lo} > {delta}");
        }
    }

    #[test]
    fn tail_tends_to_one_as_epsilon_vanishes() {
        let p = concentration_tail(1e6, 1e-9, 0.3, 0.1, TailSide::Upper);
        assert!((p - 1.0).abs() < 1e-6);
        let p = concentration_tail(1e6, 1e-9, 0.3, 0.1, TailSide::Lower);
        assert!((p - 1.0).abs() < 1e-6);
    }

    #[test]
    fn closed_form_variance_single_edge() {
        // I = 1.5, Γ = 0.5, A = 1, n = 2
        let v = skis_variance(1.5, 0.5, 1.0, 2.0);
        assert!(v.abs() < 1e-15);
        let (g, t) = setup(2, &[(0, 1, 0.5)]);
        let skis = Sketch::build(
            &g,
            &t,
            SketchKind::SKIS,
            GrowthPolicy::FixedCount(1000),
            1,
            1,
        )
        .unwrap();
        let ris = Sketch::build(
            &g,
            &t,
            SketchKind::RIS,
            GrowthPolicy::FixedCount(1000),
            1,
            1,
        )
        .unwrap();
        let r = variance_report(&g, &t, &[0], 1.5, &skis, &ris).unwrap();
        assert_eq!(r.var_z_exact, 0.0);
        assert_eq!(r.empirical_var_z, 0.0);
        assert!((r.var_z_bound - 0.1875).abs() < 1e-15);
        assert!((r.var_y - 0.1875).abs() < 1e-15);
    }

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 4.0, 2.5, 7.0, 3.0];
        let mean = xs.iter().sum::<f64>() / 5.0;
        let two_pass = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        assert!((sample_variance(xs.into_iter()) - two_pass).abs() < 1e-12);
        assert_eq!(sample_variance([3.0].into_iter()), 0.0);
    }

    #[test]
    fn query_record_json_shape() {
        let e = Estimate {
            value: 1.5,
            coverage: 3,
            samples: 3,
            kind: SketchKind::SKIS,
            additive_term: 1.0,
        };
        let json = serde_json::to_string(&QueryRecord::new(vec![0], &e)).unwrap();
        assert_eq!(
            json,
            r#"{"seed_set":[0],"estimate":1.5,"coverage":3,"T":3,"kind":"skis","additive_term":1.0}"#
        );
    }
}

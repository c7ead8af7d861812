mod common;

use std::collections::BTreeMap;

use common::*;
use skis::evaluator::exact_influence;
use skis::oracle::estimate_influence;
use skis::{GammaTable, GrowthPolicy, NodeId, RngStream, SampleKind, Sampler, Sketch, SketchKind};

#[test]
fn iis_law_is_rescaled_ris_law() {
    for name in ["diamond", "fan", "bidir"] {
        let g = fixture(name);
        let t = GammaTable::compute(&g);
        let scale = g.node_count() as f64 / t.total();
        let ris = ris_distribution(&g);
        let draws = 200_000;
        let mut counts: BTreeMap<Vec<NodeId>, usize> = BTreeMap::new();
        let mut sampler = Sampler::new(&g, &t);
        let mut rng = RngStream::new(5, 0);
        for _ in 0..draws {
            *counts
                .entry(sampler.sample(SampleKind::IIS, &mut rng).unwrap().nodes)
                .or_default() += 1;
        }
        for (set, p_ris) in &ris {
            let expected = if set.len() > 1 { p_ris * scale } else { 0.0 };
            let observed = *counts.get(set).unwrap_or(&0) as f64 / draws as f64;
            let sigma = (expected * (1.0 - expected) / draws as f64).sqrt();
            assert!(
                (observed - expected).abs() <= 5.0 * sigma + 1e-12,
                "{name} {set:?}: {observed} vs {expected}"
            );
        }
        assert!(counts.keys().all(|s| ris.contains_key(s)));
    }
}

#[test]
fn skis_estimates_are_unbiased() {
    for name in ["bidir", "chain", "mesh"] {
        let g = fixture(name);
        let t = GammaTable::compute(&g);
        let samples = 50_000;
        let sketch = Sketch::build(
            &g,
            &t,
            SketchKind::SKIS,
            GrowthPolicy::FixedCount(samples),
            3,
            1,
        )
        .unwrap();
        for v in 0..g.node_count() as NodeId {
            let exact = exact_influence(&g, &[v]).unwrap().value;
            let est = estimate_influence(&sketch, &[v]).unwrap().value;
            let x = exact - (1.0 - t.gamma(v));
            let sigma = (x * (t.total() - x) / samples as f64).max(0.0).sqrt();
            assert!(
                (est - exact).abs() <= 5.0 * sigma + 1e-12,
                "{name} {v}: {est} vs {exact}"
            );
        }
    }
}

#[test]
fn ris_singular_fraction_matches_gamma() {
    for (f, g) in load_fixtures() {
        let t = GammaTable::compute(&g);
        let n = g.node_count() as f64;
        let p = 1.0 - t.total() / n;
        let samples = 20_000;
        let sketch = Sketch::build(
            &g,
            &t,
            SketchKind::RIS,
            GrowthPolicy::FixedCount(samples),
            8,
            1,
        )
        .unwrap();
        let observed = sketch.singular_count() as f64 / samples as f64;
        let sigma = (p * (1.0 - p) / samples as f64).sqrt();
        assert!(
            (observed - p).abs() <= 5.0 * sigma + 1e-12,
            "{}: {observed} vs {p}",
            f.name
        );
    }
}

mod common;

use common::*;
use skis::evaluator::bench::{
    bench_ie, bench_im, IeConfig, IeRecord, ImAlgorithm, ImConfig, TruthConfig,
};
use skis::evaluator::exact_influence;
use skis::{GammaTable, NodeId, SketchKind};

/// Standard deviation of a single estimate from a `samples`-sized sketch.
fn sigma(
    kind: SketchKind,
    exact: f64,
    seeds: &[NodeId],
    gamma: &GammaTable,
    n: usize,
    samples: usize,
) -> f64 {
    let t = samples as f64;
    match kind {
        SketchKind::SKIS => {
            let x = exact - seeds.iter().map(|&v| 1.0 - gamma.gamma(v)).sum::<f64>();
            (x * (gamma.total() - x) / t).max(0.0).sqrt()
        }
        SketchKind::RIS => {
            let p = exact / n as f64;
            n as f64 * (p * (1.0 - p) / t).max(0.0).sqrt()
        }
    }
}

#[test]
fn bench_ie_estimates_sit_in_three_sigma_bands() {
    let mut checked = 0usize;
    let mut outside = 0usize;
    for name in ["diamond", "web", "mesh", "trivalency"] {
        let g = fixture(name);
        let gamma = GammaTable::compute(&g);
        let n = g.node_count();
        let mut config = IeConfig::new(vec![400.0], 10, 21);
        config.seed_set_sizes = vec![1, 2, 3];
        let report = bench_ie(&g, &config).unwrap();
        // repeated seed sets share a sketch, so count each distinct answer once
        let mut seen = std::collections::HashSet::new();
        for row in report.queries() {
            let truth = row.truth.unwrap();
            let est = row.estimate.unwrap();
            if !seen.insert((
                row.method,
                row.seed_set_size,
                truth.to_bits(),
                est.to_bits(),
            )) {
                continue;
            }
            let band = 3.0
                * match row.method {
                    SketchKind::RIS => sigma(SketchKind::RIS, truth, &[], &gamma, n, row.samples),
                    SketchKind::SKIS => {
                        // worst case over additive terms: x(Γ-x) ≤ Γ²/4
                        gamma.total() / 2.0 / (row.samples as f64).sqrt()
                    }
                };
            checked += 1;
            if (est - truth).abs() > band + 1e-12 {
                outside += 1;
            }
        }
    }
    assert!(checked > 50, "{checked}");

    assert!(
        outside as f64 <= 0.02 * checked as f64,
        "{outside}/{checked} outside 3σ"
    );
}

#[test]
fn skis_sigma_is_below_ris_sigma_on_fixtures() {
    for (f, g) in load_fixtures() {
        let gamma = GammaTable::compute(&g);
        let n = g.node_count();
        for v in 0..n as NodeId {
            let exact = exact_influence(&g, &[v]).unwrap().value;
            let s = sigma(SketchKind::SKIS, exact, &[v], &gamma, n, 1);
            let r = sigma(SketchKind::RIS, exact, &[v], &gamma, n, 1);
            assert!(s <= r + 1e-12, "{} {v}: {s} > {r}", f.name);
        }
    }
}

#[test]
fn bench_ie_reports_skis_no_worse_than_ris() {
    let g = fixture("mesh");
    let mut config = IeConfig::new(vec![5.0, 10.0], 50, 4);
    config.seed_set_sizes = vec![1, 3];
    let report = bench_ie(&g, &config).unwrap();
    let mut skis_total = 0.0;
    let mut ris_total = 0.0;
    for &h in &config.hs {
        for &size in &config.seed_set_sizes {
            skis_total += report
                .aggregate(SketchKind::SKIS, h, size)
                .unwrap()
                .rel_diff_pct
                .unwrap();
            ris_total += report
                .aggregate(SketchKind::RIS, h, size)
                .unwrap()
                .rel_diff_pct
                .unwrap();
        }
    }
    assert!(skis_total < ris_total, "skis {skis_total} ris {ris_total}");
    let histogram: usize = report
        .rows
        .iter()
        .filter(|r| {
            r.record == IeRecord::Histogram
                && r.method == SketchKind::SKIS
                && r.h == 5.0
                && r.seed_set_size == 1
        })
        .map(|r| r.count.unwrap())
        .sum();
    assert_eq!(histogram, 50);
}

#[test]
fn bench_im_finds_star_center() {
    let g = fixture("star");
    let mut config = ImConfig::new(vec![1], vec![100, 1000], 3, 2);
    config.truth = TruthConfig::monte_carlo(0.05, Some(0.05));
    let report = bench_im(&g, &config).unwrap();
    assert_eq!(report.rows.len(), 3 * 5);
    for row in &report.rows {
        assert_eq!(row.seeds, "0", "{row:?}");
        assert!((row.influence - 2.5).abs() / 2.5 < 0.1);
    }
    assert!(report
        .rows
        .iter()
        .any(|r| r.algorithm == ImAlgorithm::DssaSkis));
}

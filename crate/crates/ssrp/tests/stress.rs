//! Broad-family randomized stress: solver vs oracle across shapes the main
//! suites do not emphasize (bare trees, dense graphs, pure long paths, tiny
//! graphs, both replacement-path backends).

use ssrp::graph::WeightFunction;
use ssrp::oracle::ssrp_oracle;
use ssrp::random::{gnm_reachable, path_with_chords};
use ssrp::{solve_ssrp, RpBackend, SolveConfig};

#[test]
fn mixed_families_never_undershoot_and_rarely_miss() {
    let mut total = 0u64;
    let mut under = 0u64;
    let mut mismatch = 0u64;
    let mut instances = 0u64;
    for seed in 0..160u64 {
        let g = match seed % 8 {
            // Bare arborescence: every failure disconnects a subtree.
            0 => gnm_reachable(2 + (seed as usize % 60), 1 + (seed as usize % 60), seed),
            // Dense.
            1 => gnm_reachable(40, 40 * 39 / 2, seed),
            // Long path, no recovery edges at all.
            2 => path_with_chords(120, 119, 0, seed),
            // Just above the base case.
            3 => gnm_reachable(7, 6 + (seed as usize % 30), seed),
            4 => path_with_chords(100, 60, 150, seed),
            5 => gnm_reachable(100, 400, seed),
            6 => path_with_chords(60, 40, 30, seed),
            // Tiny.
            _ => gnm_reachable(2 + (seed as usize % 5), 1 + (seed as usize % 5), seed),
        }
        .unwrap();
        let cfg = SolveConfig {
            c: 3,
            seed: seed * 13 + 5,
            rp_backend: if seed % 2 == 0 {
                RpBackend::Sampled
            } else {
                RpBackend::Exact
            },
            debug_checks: true,
        };
        let report = solve_ssrp(&g, 0, &cfg).unwrap();
        let w = WeightFunction::infinite(0, g.n());
        let truth = ssrp_oracle(&g, &w, &report.table.edges);
        instances += 1;
        for (row, ((eu, ev), got)) in truth.iter().zip(report.table.rows()) {
            for x in 0..g.n() {
                total += 1;
                if got[x] < row[x] {
                    under += 1;
                    eprintln!("undershoot: seed={seed} e=({eu},{ev}) x={x}");
                } else if got[x] > row[x] {
                    mismatch += 1;
                }
            }
        }
    }
    assert_eq!(under, 0, "one-sided error violated");
    assert!(instances >= 160);
    assert!(
        (mismatch as f64) < 0.001 * total as f64 + 1.0,
        "{mismatch}/{total} mismatches"
    );
}

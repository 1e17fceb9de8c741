//! Monte-Carlo size and convergence measurements frozen as tests. The
//! numeric envelopes were measured before being locked in.

use vicinity::generators::{gen_connected, gen_gnm};
use vicinity::routing::deploy;
use vicinity::stretch2::{build_stretch2, Stretch2Config, Variant};
use vicinity::tz::tz_build;

fn audit_graph() -> vicinity::Graph {
    gen_connected(|s| gen_gnm(1024, 3072, s), 40_000, 64).unwrap().0
}

#[test]
fn las_vegas_accepts_within_three_attempts() {
    // Default bound: 4x the expected-size formula. Measured: every one of
    // 100 trials accepted its first attempt.
    let g = audit_graph();
    for seed in 0..100u64 {
        let o = build_stretch2(&g, &Stretch2Config::new(32.0, Variant::OnFly, seed)).unwrap();
        assert!(o.build_attempts() <= 3, "seed {seed} took {} attempts", o.build_attempts());
    }
}

#[test]
fn tz_bunch_totals_scale_as_n_to_three_halves() {
    let g = audit_graph();
    let mut total = 0u64;
    for seed in 0..100u64 {
        total += tz_build(&g, 2, seed).unwrap().bunch_entry_count();
    }
    let mean = total as f64 / 100.0;
    let c = mean / (g.node_count() as f64).powf(1.5);
    // Measured c = 1.46; the fitted-constant envelope is 8.
    assert!(c <= 8.0, "bunch totals {mean} give c = {c}");
}

#[test]
fn deployment_entry_counts_stay_within_budget() {
    // alpha = sqrt(n / avg degree) balances the landmark and vicinity table
    // shares; every router then fits 8 * sqrt(n * avg degree) entries.
    let g = audit_graph();
    let n = g.node_count() as f64;
    let alpha = (n / g.avg_degree()).sqrt();
    let budget = 8.0 * (n * g.avg_degree()).sqrt();
    for seed in 0..20u64 {
        let net = deploy(&g, alpha, seed).unwrap();
        assert!(
            (net.max_entry_count() as f64) <= budget,
            "seed {seed}: max {} over {budget}",
            net.max_entry_count()
        );
        assert!(net.mean_entry_count() <= net.max_entry_count() as f64);
    }
}

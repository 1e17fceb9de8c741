//! Property suites for the two intersection lemmas and the sampling-size
//! expectations, on corpora of random graphs with exact ground truth.

use vicinity::generators::{gen_connected, gen_gnm};
use vicinity::graph::{exact_oracle, NodeId, SearchScratch};
use vicinity::landmark::{
    ball_ball_intersect, ball_vicinity_intersect, compute_ball_and_vicinity, sample_landmarks,
    LandmarkMode,
};

#[test]
fn ball_vicinity_miss_bounds_distance_below() {
    // Empty intersection of B(u) with the vicinity of v forces
    // d(u, v) >= r_u + r_v.
    for graph_seed in 0..50u64 {
        let (g, _) = gen_connected(|s| gen_gnm(96, 288, s), 1000 + graph_seed, 64).unwrap();
        let ap = exact_oracle(&g, 256).unwrap();
        let landmarks =
            sample_landmarks(&g, &LandmarkMode::Uniform { alpha: 8.0 }, graph_seed).unwrap();
        let mut scratch = SearchScratch::new();
        let tables: Vec<_> = (0..g.node_count() as NodeId)
            .map(|v| compute_ball_and_vicinity(&g, v, &landmarks, &mut scratch))
            .collect();
        for u in 0..g.node_count() as NodeId {
            for v in 0..g.node_count() as NodeId {
                let (bu, _) = &tables[u as usize];
                let (_, gv) = &tables[v as usize];
                let (meet, probes) = ball_vicinity_intersect(bu, gv);
                assert!(probes <= bu.len() as u32);
                if meet.is_none() {
                    let lower = bu.radius + tables[v as usize].0.radius;
                    assert!(
                        ap.dist(u, v) >= lower,
                        "graph {graph_seed} pair ({u},{v}): d={} < {lower}",
                        ap.dist(u, v)
                    );
                }
            }
        }
    }
}

#[test]
fn ball_ball_miss_bounds_distance_below() {
    // Empty ball-ball intersection forces d(u, v) >= r_u + r_v - w_uv with
    // w_uv the heaviest edge on the shortest path.
    for graph_seed in 0..50u64 {
        let (g, _) = gen_connected(|s| gen_gnm(96, 288, s), 2000 + graph_seed, 64).unwrap();
        let ap = exact_oracle(&g, 256).unwrap();
        let landmarks =
            sample_landmarks(&g, &LandmarkMode::Uniform { alpha: 8.0 }, graph_seed).unwrap();
        let mut scratch = SearchScratch::new();
        let tables: Vec<_> = (0..g.node_count() as NodeId)
            .map(|v| compute_ball_and_vicinity(&g, v, &landmarks, &mut scratch))
            .collect();
        for u in 0..g.node_count() as NodeId {
            for v in 0..g.node_count() as NodeId {
                if u == v {
                    continue;
                }
                let (bu, _) = &tables[u as usize];
                let (bv, _) = &tables[v as usize];
                let (meet, _) = ball_ball_intersect(bu, bv);
                if meet.is_none() {
                    let w_uv = ap.max_edge_on_path(&g, u, v);
                    let lower = bu.radius + bv.radius - w_uv;
                    assert!(
                        ap.dist(u, v) >= lower,
                        "graph {graph_seed} pair ({u},{v}): d={} < {lower}",
                        ap.dist(u, v)
                    );
                }
            }
        }
    }
}

#[test]
fn mean_ball_size_stays_linear_in_alpha() {
    let alpha = 8.0;
    let (g, _) = gen_connected(|s| gen_gnm(256, 768, s), 7, 64).unwrap();
    let mut scratch = SearchScratch::new();
    let mut total = 0usize;
    let mut count = 0usize;
    for seed in 0..100u64 {
        let landmarks = sample_landmarks(&g, &LandmarkMode::Uniform { alpha }, seed).unwrap();
        for v in 0..g.node_count() as NodeId {
            let (ball, _) = compute_ball_and_vicinity(&g, v, &landmarks, &mut scratch);
            total += ball.len();
            count += 1;
        }
    }
    let mean = total as f64 / count as f64;
    assert!(mean <= 3.0 * alpha, "mean ball size {mean} above 3*alpha");
}

#[test]
fn landmark_count_matches_binomial_expectation() {
    // 200 seeds of uniform sampling at alpha = sqrt(n) on n = 1024 nodes.
    let n = 1024usize;
    let alpha = (n as f64).sqrt();
    let g = gen_gnm(n, 3072, 99).unwrap();
    let p = 1.0 / alpha;
    let expect = n as f64 * p;
    let sigma = (n as f64 * p * (1.0 - p)).sqrt();
    let seeds = 200u64;
    let mut total = 0usize;
    for seed in 0..seeds {
        total += sample_landmarks(&g, &LandmarkMode::Uniform { alpha }, seed)
            .unwrap()
            .len();
    }
    let mean = total as f64 / seeds as f64;
    // The mean of 200 draws concentrates much tighter than one draw; the
    // 4-sigma band on a single draw is a loose envelope for it.
    assert!(
        (mean - expect).abs() <= 4.0 * sigma,
        "mean |L| = {mean}, expected {expect} +- {}",
        4.0 * sigma
    );
}

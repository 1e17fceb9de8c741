//! Degree reduction: turns an average-degree-bounded graph into a
//! maximum-degree-bounded one while preserving all pairwise distances.
//!
//! Each node `v` expands into `ceil(deg(v)/delta)` copies chained by
//! weight-0 edges; `v`'s incident edges, sorted by neighbor id, fill the
//! copies in order so that every copy except the last carries exactly
//! `delta` of them. Every copy therefore has degree at most `delta + 2`,
//! the copy count is at most `2n` whenever `delta` is at least the average
//! degree, and distances between first copies equal distances in the input.
//!
//! Oracles do not run on the reduced graph; they use
//! [`degree_proportional_probability`], the sampling-side reading of the same
//! transformation. The explicit reduction exists so the equivalence can be
//! verified.

use alloc::vec::Vec;

use crate::graph::{dijkstra, Graph, NodeId};

/// A maximum-degree-bounded graph emulating the input graph.
#[derive(Debug, Clone)]
pub struct ReducedGraph {
    pub graph: Graph,
    /// Copies of each original node, in chain order.
    copies: Vec<Vec<NodeId>>,
    /// Original node of each copy.
    origin: Vec<NodeId>,
}

impl ReducedGraph {
    pub fn copies(&self, v: NodeId) -> &[NodeId] {
        &self.copies[v as usize]
    }

    pub fn origin(&self, copy: NodeId) -> NodeId {
        self.origin[copy as usize]
    }

    /// First copy of `v`, the canonical representative.
    pub fn representative(&self, v: NodeId) -> NodeId {
        self.copies[v as usize][0]
    }

    pub fn original_count(&self) -> usize {
        self.copies.len()
    }
}

/// Expands `g` into a `delta`-degree-bounded graph (plus two chain-edge slots
/// per copy). Deterministic: edges are assigned to copies in neighbor-id
/// order.
pub fn reduce(g: &Graph, delta: u32) -> ReducedGraph {
    assert!(delta >= 1, "delta must be positive");
    let n = g.node_count();
    let delta = delta as usize;

    let mut copies: Vec<Vec<NodeId>> = Vec::with_capacity(n);
    let mut origin: Vec<NodeId> = Vec::new();
    let mut next = 0 as NodeId;
    for v in 0..n {
        let count = g.degree(v as NodeId).div_ceil(delta).max(1);
        let ids: Vec<NodeId> = (0..count).map(|i| next + i as NodeId).collect();
        next += count as NodeId;
        origin.extend(core::iter::repeat_n(v as NodeId, count));
        copies.push(ids);
    }

    // Position of each neighbor in v's sorted adjacency decides the copy.
    let copy_for = |v: NodeId, neighbor: NodeId| -> NodeId {
        let pos = g
            .neighbors(v)
            .position(|(w, _)| w == neighbor)
            .expect("neighbor present");
        copies[v as usize][pos / delta]
    };

    let mut edges: Vec<(NodeId, NodeId, f64)> = Vec::new();
    for &(u, v, w) in g.edges() {
        edges.push((copy_for(u, v), copy_for(v, u), w));
    }
    for ids in &copies {
        for pair in ids.windows(2) {
            edges.push((pair[0], pair[1], 0.0));
        }
    }

    let graph = Graph::from_edges(next as usize, edges).expect("reduction edges are valid");
    ReducedGraph { graph, copies, origin }
}

/// Result of comparing all-pairs distances between a graph and its reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreservationReport {
    pub pairs_checked: usize,
    pub max_discrepancy: f64,
}

/// Compares `d_G(u, v)` against the distance between the representatives of
/// `u` and `v` in the reduced graph, over all pairs. Unreachable pairs must
/// be unreachable on both sides. The discrepancy must come out 0.
pub fn distance_preservation_check(g: &Graph, rg: &ReducedGraph) -> PreservationReport {
    let n = g.node_count();
    let mut max_disc = 0.0f64;
    let mut pairs = 0usize;
    for u in 0..n as NodeId {
        let orig = dijkstra(g, u);
        let red = dijkstra(&rg.graph, rg.representative(u));
        for v in 0..n as NodeId {
            let a = orig.dist(v);
            let b = red.dist(rg.representative(v));
            pairs += 1;
            let disc = if a.is_infinite() && b.is_infinite() {
                0.0
            } else {
                (a - b).abs()
            };
            max_disc = max_disc.max(disc);
        }
    }
    PreservationReport { pairs_checked: pairs, max_discrepancy: max_disc }
}

/// Landmark sampling probability that emulates running a uniform `1/alpha`
/// sampler on the reduced graph: `min(1, ceil(deg(v)/delta) / alpha)`.
pub fn degree_proportional_probability(g: &Graph, v: NodeId, alpha: f64, delta: f64) -> f64 {
    debug_assert!(alpha >= 1.0 && delta > 0.0);
    let copies = libm::ceil(g.degree(v) as f64 / delta);
    (copies / alpha).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fix_p5;

    fn star5() -> Graph {
        Graph::from_edges(5, (1..5).map(|leaf| (0, leaf, 1.0))).unwrap()
    }

    #[test]
    fn star_center_splits_into_two_copies() {
        let g = star5();
        let rg = reduce(&g, 2);
        assert_eq!(rg.graph.node_count(), 6);
        assert_eq!(rg.copies(0).len(), 2);
        for leaf in 1..5u32 {
            assert_eq!(rg.copies(leaf).len(), 1);
        }
        // Two leaf edges plus one chain edge per center copy.
        for &c in rg.copies(0) {
            assert_eq!(rg.graph.degree(c), 3);
        }
        assert_eq!(rg.graph.edge_weight(rg.copies(0)[0], rg.copies(0)[1]), Some(0.0));
    }

    #[test]
    fn path_graph_is_untouched() {
        let g = fix_p5();
        let rg = reduce(&g, 2);
        assert_eq!(rg.graph.node_count(), 5);
        for v in 0..5u32 {
            assert_eq!(rg.copies(v), &[v]);
        }
        assert_eq!(rg.graph.edges(), g.edges());
    }

    #[test]
    fn delta_at_max_degree_is_identity() {
        let g = star5();
        let rg = reduce(&g, 4);
        assert_eq!(rg.graph.node_count(), 5);
        assert_eq!(rg.graph.edges(), g.edges());
    }

    #[test]
    fn preserves_distances() {
        for (g, delta) in [(fix_p5(), 1), (star5(), 2), (star5(), 1)] {
            let rg = reduce(&g, delta);
            let report = distance_preservation_check(&g, &rg);
            assert_eq!(report.max_discrepancy, 0.0);
        }
        let single = Graph::from_edges(2, [(0, 1, 2.5)]).unwrap();
        let rg = reduce(&single, 1);
        assert_eq!(distance_preservation_check(&single, &rg).max_discrepancy, 0.0);
    }

    #[test]
    fn degree_bound_and_node_bound() {
        let g = crate::generators::gen_gnm(64, 128, 11).unwrap();
        for delta in [1u32, 2, 4] {
            let rg = reduce(&g, delta);
            // 2m/n = 4, so the 2n bound applies for delta >= 4; the degree
            // bound holds for every delta.
            for c in 0..rg.graph.node_count() as NodeId {
                assert!(rg.graph.degree(c) <= delta as usize + 2);
            }
            if delta as f64 >= g.avg_degree() {
                assert!(rg.graph.node_count() <= 2 * g.node_count());
            }
        }
    }

    #[test]
    fn sampling_probability_formula() {
        let g = star5();
        // deg(center) = 4 = delta -> ceil(1)/alpha.
        assert_eq!(degree_proportional_probability(&g, 0, 4.0, 4.0), 0.25);
        // deg = 3*delta + 1 -> ceil = 4, capped at 1.
        let hub = Graph::from_edges(8, (1..8).map(|v| (0, v, 1.0))).unwrap();
        assert_eq!(degree_proportional_probability(&hub, 0, 2.0, 2.0), 1.0);
        // deg = 1, delta = 6 -> ceil(1/6) = 1.
        assert_eq!(degree_proportional_probability(&g, 1, 10.0, 6.0), 0.1);
    }
}

//! Self-contained Thorup-Zwick distance oracle with stretch `2k - 1`.
//!
//! Used both as a standalone baseline on full graphs and as the sub-oracle
//! over the landmark complete graph inside the stretch-(4k-1) and additive
//! oracles. Also exports per-node routing tables (next hops toward top-level
//! nodes and toward bunch members) for the routing simulator.
//!
//! Construction samples nested levels `A_0 = V, A_1, .., A_{k-1}` (each from
//! the previous with probability `n^(-1/k)`), computes per-level nearest
//! witnesses, and grows each node's cluster with a pruned search; bunches are
//! the cluster memberships transposed. Queries climb witnesses, swapping
//! endpoints, until the witness lands in the other side's bunch.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use alloc::collections::BinaryHeap;

use crate::graph::{dijkstra, dijkstra_multi, Graph, NodeId, INVALID_NODE};
use crate::landmark::HasStoredSize;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq)]
pub enum TzError {
    Disconnected,
    BadK { k: u32 },
    /// The top level kept sampling empty.
    EmptyTopLevel { attempts: u32 },
}

impl fmt::Display for TzError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TzError::Disconnected => write!(f, "graph is not connected"),
            TzError::BadK { k } => write!(f, "k must be at least 1, got {k}"),
            TzError::EmptyTopLevel { attempts } => {
                write!(f, "top level A_(k-1) empty after {attempts} redraws")
            }
        }
    }
}

impl core::error::Error for TzError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessEntry {
    pub witness: NodeId,
    pub dist: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BunchEntry {
    pub node: NodeId,
    pub dist: f64,
    /// Neighbor on the shortest path toward `node` (from the bunch owner).
    pub next_hop: NodeId,
}

/// Built Thorup-Zwick oracle.
#[derive(Debug, Clone)]
pub struct TzOracle {
    k: u32,
    n: usize,
    seed: u64,
    levels: Vec<Vec<NodeId>>,
    witnesses: Vec<Vec<WitnessEntry>>,
    bunch_offsets: Vec<usize>,
    bunch_entries: Vec<BunchEntry>,
}

/// Outcome of a single query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TzTrace {
    pub estimate: f64,
    pub final_witness: NodeId,
    pub level_used: u32,
}

impl TzOracle {
    /// Reassembles an oracle from its serialized arrays.
    pub fn from_parts(
        k: u32,
        n: usize,
        seed: u64,
        levels: Vec<Vec<NodeId>>,
        witnesses: Vec<Vec<WitnessEntry>>,
        bunch_offsets: Vec<usize>,
        bunch_entries: Vec<BunchEntry>,
    ) -> Self {
        assert_eq!(levels.len(), k as usize);
        assert_eq!(witnesses.len(), k as usize);
        assert_eq!(bunch_offsets.len(), n + 1);
        TzOracle { k, n, seed, levels, witnesses, bunch_offsets, bunch_entries }
    }

    pub fn witness_level(&self, level: u32) -> &[WitnessEntry] {
        &self.witnesses[level as usize]
    }

    pub fn bunch_offsets(&self) -> &[usize] {
        &self.bunch_offsets
    }

    pub fn bunch_entries_flat(&self) -> &[BunchEntry] {
        &self.bunch_entries
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Sampled levels `A_0 .. A_{k-1}`, each sorted ascending.
    pub fn levels(&self) -> &[Vec<NodeId>] {
        &self.levels
    }

    pub fn witness(&self, level: u32, v: NodeId) -> WitnessEntry {
        self.witnesses[level as usize][v as usize]
    }

    pub fn bunch(&self, v: NodeId) -> &[BunchEntry] {
        &self.bunch_entries[self.bunch_offsets[v as usize]..self.bunch_offsets[v as usize + 1]]
    }

    pub fn bunch_get(&self, v: NodeId, w: NodeId) -> Option<&BunchEntry> {
        let b = self.bunch(v);
        b.binary_search_by_key(&w, |e| e.node).ok().map(|i| &b[i])
    }

    pub fn bunch_entry_count(&self) -> u64 {
        self.bunch_entries.len() as u64
    }
}

impl HasStoredSize for TzOracle {
    /// Witness rows plus bunch entries (level membership is bitmap-sized).
    fn stored_entries(&self) -> u64 {
        (self.k as u64) * (self.n as u64) + self.bunch_entries.len() as u64
    }
}

/// Builds the oracle with levels sampled from `seed`.
pub fn tz_build(g: &Graph, k: u32, seed: u64) -> Result<TzOracle, TzError> {
    build_inner(g, k, seed, None)
}

/// Builds with a forced `A_1` (levels above it are sampled as usual); the
/// evaluation harness uses this to hand the baseline the same landmark set
/// as the landmark oracles.
pub fn tz_build_with_first_level(
    g: &Graph,
    k: u32,
    first_level: &[NodeId],
    seed: u64,
) -> Result<TzOracle, TzError> {
    build_inner(g, k, seed, Some(first_level))
}

fn build_inner(
    g: &Graph,
    k: u32,
    seed: u64,
    first_level: Option<&[NodeId]>,
) -> Result<TzOracle, TzError> {
    if k < 1 {
        return Err(TzError::BadK { k });
    }
    if !g.is_connected() {
        return Err(TzError::Disconnected);
    }
    let n = g.node_count();
    let q = libm::pow(n as f64, -1.0 / k as f64);

    const MAX_DRAWS: u32 = 64;
    let mut levels: Vec<Vec<NodeId>> = Vec::new();
    for attempt in 0..MAX_DRAWS {
        let mut rng = SplitMix64::new(seed.wrapping_add(attempt as u64));
        levels.clear();
        levels.push((0..n as NodeId).collect());
        for i in 1..k as usize {
            let next: Vec<NodeId> = if i == 1 {
                match first_level {
                    Some(forced) => {
                        let mut v = forced.to_vec();
                        v.sort_unstable();
                        v.dedup();
                        v
                    }
                    None => levels[0].iter().copied().filter(|_| rng.bernoulli(q)).collect(),
                }
            } else {
                levels[i - 1].iter().copied().filter(|_| rng.bernoulli(q)).collect()
            };
            levels.push(next);
        }
        if !levels[k as usize - 1].is_empty() {
            break;
        }
        if attempt + 1 == MAX_DRAWS {
            return Err(TzError::EmptyTopLevel { attempts: MAX_DRAWS });
        }
    }

    // level_of[v] = highest level containing v (levels are nested).
    let mut level_of = vec![0u32; n];
    for (i, level) in levels.iter().enumerate() {
        for &v in level {
            level_of[v as usize] = i as u32;
        }
    }

    let mut witnesses: Vec<Vec<WitnessEntry>> = Vec::with_capacity(k as usize);
    witnesses.push(
        (0..n as NodeId)
            .map(|v| WitnessEntry { witness: v, dist: 0.0 })
            .collect(),
    );
    for level in levels.iter().take(k as usize).skip(1) {
        let wt = dijkstra_multi(g, level);
        witnesses.push(
            (0..n)
                .map(|v| WitnessEntry { witness: wt.witness[v], dist: wt.dist[v] })
                .collect(),
        );
    }
    // Prefer the higher-level witness on distance ties: every distinct
    // witness then sits in its holder's bunch, which keeps witness legs
    // routable hop by hop.
    for i in (0..k as usize - 1).rev() {
        let (lower, upper) = witnesses.split_at_mut(i + 1);
        for (cur, next) in lower[i].iter_mut().zip(&upper[0]) {
            if cur.dist == next.dist {
                *cur = *next;
            }
        }
    }

    let mut bunches: Vec<Vec<BunchEntry>> = vec![Vec::new(); n];
    let mut cluster = ClusterScratch::new(n);
    for i in 0..k as usize {
        for &w in &levels[i] {
            if level_of[w as usize] as usize > i {
                continue; // belongs to A_{i+1}, handled at its own level
            }
            let bound = |x: NodeId| {
                if i + 1 < k as usize {
                    witnesses[i + 1][x as usize].dist
                } else {
                    f64::INFINITY
                }
            };
            cluster.grow(g, w, bound, |x, dist, parent| {
                bunches[x as usize].push(BunchEntry { node: w, dist, next_hop: parent });
            });
        }
    }

    let mut bunch_offsets = Vec::with_capacity(n + 1);
    let mut bunch_entries = Vec::new();
    bunch_offsets.push(0);
    for b in &mut bunches {
        b.sort_unstable_by_key(|e| e.node);
        bunch_entries.extend_from_slice(b);
        bunch_offsets.push(bunch_entries.len());
    }

    Ok(TzOracle { k, n, seed, levels, witnesses, bunch_offsets, bunch_entries })
}

#[derive(Clone, Copy)]
struct ClusterItem {
    dist: f64,
    node: NodeId,
}

impl PartialEq for ClusterItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ClusterItem {}
impl PartialOrd for ClusterItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ClusterItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Stamped scratch for the pruned cluster searches.
struct ClusterScratch {
    dist: Vec<f64>,
    parent: Vec<NodeId>,
    seen: Vec<u32>,
    done: Vec<u32>,
    round: u32,
    heap: BinaryHeap<ClusterItem>,
}

impl ClusterScratch {
    fn new(n: usize) -> Self {
        ClusterScratch {
            dist: vec![0.0; n],
            parent: vec![INVALID_NODE; n],
            seen: vec![0; n],
            done: vec![0; n],
            round: 0,
            heap: BinaryHeap::new(),
        }
    }

    /// Grows the cluster of `w`: nodes whose distance to `w` is strictly
    /// below `bound(node)`. Shortest paths within the cluster stay within it,
    /// so the pruned relaxation settles exact distances.
    fn grow(
        &mut self,
        g: &Graph,
        w: NodeId,
        bound: impl Fn(NodeId) -> f64,
        mut visit: impl FnMut(NodeId, f64, NodeId),
    ) {
        self.round += 1;
        self.heap.clear();
        let wi = w as usize;
        self.dist[wi] = 0.0;
        self.parent[wi] = w;
        self.seen[wi] = self.round;
        if bound(w) <= 0.0 {
            return;
        }
        self.heap.push(ClusterItem { dist: 0.0, node: w });
        while let Some(ClusterItem { dist: d, node: u }) = self.heap.pop() {
            let ui = u as usize;
            if self.done[ui] == self.round || d > self.dist[ui] {
                continue;
            }
            self.done[ui] = self.round;
            visit(u, d, self.parent[ui]);
            for (x, wt) in g.neighbors(u) {
                let xi = x as usize;
                if self.done[xi] == self.round {
                    continue;
                }
                let nd = d + wt;
                if nd >= bound(x) {
                    continue;
                }
                if self.seen[xi] != self.round || nd < self.dist[xi] {
                    self.seen[xi] = self.round;
                    self.dist[xi] = nd;
                    self.parent[xi] = u;
                    self.heap.push(ClusterItem { dist: nd, node: x });
                }
            }
        }
    }
}

/// Bidirectional witness climbing; the estimate never undershoots the true
/// distance and never exceeds `(2k-1)` times it.
pub fn tz_query(o: &TzOracle, u: NodeId, v: NodeId) -> TzTrace {
    if u == v {
        return TzTrace { estimate: 0.0, final_witness: u, level_used: 0 };
    }
    let (mut x, mut y) = (u, v);
    let mut w = x;
    let mut d_xw = 0.0;
    let mut i = 0u32;
    loop {
        if let Some(e) = o.bunch_get(y, w) {
            return TzTrace { estimate: d_xw + e.dist, final_witness: w, level_used: i };
        }
        i += 1;
        core::mem::swap(&mut x, &mut y);
        let e = o.witness(i, x);
        w = e.witness;
        d_xw = e.dist;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteEntry {
    pub target: NodeId,
    pub next_hop: NodeId,
    pub dist: f64,
}

/// Per-node forwarding state: next hops toward every top-level node (their
/// shortest-path trees) and toward every bunch member.
#[derive(Debug, Clone)]
pub struct TzRoutingTables {
    tree: Vec<Vec<RouteEntry>>,
    bunch: Vec<Vec<RouteEntry>>,
}

impl TzRoutingTables {
    pub fn tree_entries(&self, v: NodeId) -> &[RouteEntry] {
        &self.tree[v as usize]
    }

    pub fn bunch_entries(&self, v: NodeId) -> &[RouteEntry] {
        &self.bunch[v as usize]
    }

    pub fn entry_count(&self, v: NodeId) -> usize {
        self.tree[v as usize].len() + self.bunch[v as usize].len()
    }

    fn lookup(&self, at: NodeId, target: NodeId) -> Option<NodeId> {
        let b = &self.bunch[at as usize];
        if let Ok(i) = b.binary_search_by_key(&target, |e| e.target) {
            return Some(b[i].next_hop);
        }
        let t = &self.tree[at as usize];
        t.binary_search_by_key(&target, |e| e.target)
            .ok()
            .map(|i| t[i].next_hop)
    }
}

/// Extracts forwarding tables sufficient to reproduce every query-selected
/// route hop by hop.
pub fn tz_routing_tables(o: &TzOracle, g: &Graph) -> TzRoutingTables {
    let n = o.node_count();
    let mut tree: Vec<Vec<RouteEntry>> = vec![Vec::new(); n];
    let top = &o.levels()[o.k() as usize - 1];
    for &l in top {
        let table = dijkstra(g, l);
        for v in 0..n as NodeId {
            if v == l {
                continue;
            }
            let hop = table.parent(v).expect("connected");
            tree[v as usize].push(RouteEntry { target: l, next_hop: hop, dist: table.dist(v) });
        }
    }
    let mut bunch: Vec<Vec<RouteEntry>> = vec![Vec::new(); n];
    for v in 0..n as NodeId {
        for e in o.bunch(v) {
            if e.node == v {
                continue;
            }
            bunch[v as usize].push(RouteEntry { target: e.node, next_hop: e.next_hop, dist: e.dist });
        }
    }
    for v in 0..n {
        tree[v].sort_unstable_by_key(|e| e.target);
        bunch[v].sort_unstable_by_key(|e| e.target);
    }
    TzRoutingTables { tree, bunch }
}

/// Walks a query's route through the forwarding tables. Test instrumentation:
/// the walked length must reproduce the query estimate.
pub fn simulate_forward(
    o: &TzOracle,
    tables: &TzRoutingTables,
    g: &Graph,
    u: NodeId,
    v: NodeId,
) -> Vec<NodeId> {
    if u == v {
        return vec![u];
    }
    // Re-run the climb to recover the endpoint orientation at exit.
    let (mut x, mut y) = (u, v);
    let mut w = x;
    let mut i = 0u32;
    while o.bunch_get(y, w).is_none() {
        i += 1;
        core::mem::swap(&mut x, &mut y);
        w = o.witness(i, x).witness;
    }

    let walk = |from: NodeId, target: NodeId| -> Vec<NodeId> {
        let mut path = vec![from];
        let mut cur = from;
        let mut hops = 0;
        while cur != target {
            cur = tables
                .lookup(cur, target)
                .expect("route target present in tables along the walk");
            path.push(cur);
            hops += 1;
            assert!(hops <= g.node_count(), "forwarding loop");
        }
        path
    };

    let mut path = walk(x, w);
    let back = walk(y, w);
    path.extend(back.iter().rev().skip(1));
    if x != u {
        path.reverse();
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fix_p5;
    use crate::graph::exact_oracle;

    #[test]
    fn k1_degenerates_to_all_pairs() {
        let g = fix_p5();
        let o = tz_build(&g, 1, 0).unwrap();
        for v in 0..5u32 {
            assert_eq!(o.bunch(v).len(), 5);
        }
        let ap = exact_oracle(&g, 16).unwrap();
        for u in 0..5u32 {
            for v in 0..5u32 {
                assert_eq!(tz_query(&o, u, v).estimate, ap.dist(u, v));
            }
        }
    }

    #[test]
    fn identity_query_is_zero() {
        let g = crate::generators::gen_connected(|s| crate::generators::gen_gnm(64, 192, s), 7, 64)
            .unwrap()
            .0;
        let o = tz_build(&g, 2, 3).unwrap();
        for x in [0u32, 5, 63] {
            assert_eq!(tz_query(&o, x, x).estimate, 0.0);
        }
    }

    #[test]
    fn single_edge_graph_is_exact_for_any_k() {
        let g = Graph::from_edges(2, [(0, 1, 2.5)]).unwrap();
        for k in 1..=3 {
            let o = tz_build(&g, k, 1).unwrap();
            assert_eq!(tz_query(&o, 0, 1).estimate, 2.5);
        }
    }

    #[test]
    fn rejects_disconnected_and_bad_k() {
        let g = Graph::from_edges(3, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(tz_build(&g, 2, 0), Err(TzError::Disconnected)));
        let g = fix_p5();
        assert!(matches!(tz_build(&g, 0, 0), Err(TzError::BadK { .. })));
    }

    #[test]
    fn stretch_sandwich_k2() {
        let g = crate::generators::gen_connected(|s| crate::generators::gen_gnm(96, 288, s), 2, 64)
            .unwrap()
            .0;
        let ap = exact_oracle(&g, 128).unwrap();
        let o = tz_build(&g, 2, 11).unwrap();
        for u in 0..96u32 {
            for v in 0..96u32 {
                let d = ap.dist(u, v);
                let est = tz_query(&o, u, v).estimate;
                assert!(est >= d && est <= 3.0 * d || (u == v && est == 0.0));
            }
        }
    }

    #[test]
    fn bunches_match_bruteforce_definition() {
        let g = crate::generators::gen_connected(|s| crate::generators::gen_gnm(48, 144, s), 5, 64)
            .unwrap()
            .0;
        let k = 3u32;
        let o = tz_build(&g, k, 9).unwrap();
        let n = g.node_count();
        let tables: Vec<_> = (0..n as NodeId).map(|v| dijkstra(&g, v)).collect();
        let level_dist = |i: usize, v: NodeId| -> f64 {
            if i >= k as usize {
                return f64::INFINITY;
            }
            o.levels()[i]
                .iter()
                .map(|&l| tables[v as usize].dist(l))
                .fold(f64::INFINITY, f64::min)
        };
        for v in 0..n as NodeId {
            let mut expect: Vec<(NodeId, f64)> = Vec::new();
            for i in 0..k as usize {
                for &w in &o.levels()[i] {
                    let in_next = i + 1 < k as usize && o.levels()[i + 1].contains(&w);
                    if in_next {
                        continue;
                    }
                    let d = tables[v as usize].dist(w);
                    if d < level_dist(i + 1, v) {
                        expect.push((w, d));
                    }
                }
            }
            expect.sort_unstable_by_key(|e| e.0);
            let got: Vec<(NodeId, f64)> = o.bunch(v).iter().map(|e| (e.node, e.dist)).collect();
            assert_eq!(got, expect, "bunch of {v}");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let g = crate::generators::gen_connected(|s| crate::generators::gen_gnm(64, 192, s), 3, 64)
            .unwrap()
            .0;
        let a = tz_build(&g, 2, 21).unwrap();
        let b = tz_build(&g, 2, 21).unwrap();
        assert_eq!(a.levels(), b.levels());
        assert_eq!(a.bunch_entry_count(), b.bunch_entry_count());
        for v in 0..64u32 {
            assert_eq!(a.bunch(v), b.bunch(v));
        }
    }

    #[test]
    fn routing_tables_on_path_graph() {
        let g = fix_p5();
        let o = tz_build(&g, 1, 0).unwrap();
        let t = tz_routing_tables(&o, &g);
        let hop = t.lookup(0, 4).unwrap();
        assert_eq!(hop, 1);
        let path = simulate_forward(&o, &t, &g, 0, 4);
        assert_eq!(path, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn single_node_graph_has_empty_tables() {
        let g = Graph::from_edges(1, core::iter::empty()).unwrap();
        let o = tz_build(&g, 1, 0).unwrap();
        let t = tz_routing_tables(&o, &g);
        assert_eq!(t.entry_count(0), 0);
    }

    #[test]
    fn forwarding_reproduces_estimates() {
        let g = crate::generators::gen_connected(|s| crate::generators::gen_gnm(48, 120, s), 13, 64)
            .unwrap()
            .0;
        for k in [1u32, 2, 3] {
            let o = tz_build(&g, k, 17).unwrap();
            let t = tz_routing_tables(&o, &g);
            for u in 0..48u32 {
                for v in 0..48u32 {
                    let est = tz_query(&o, u, v).estimate;
                    let path = simulate_forward(&o, &t, &g, u, v);
                    let mut len = 0.0;
                    for hop in path.windows(2) {
                        len += g.edge_weight(hop[0], hop[1]).unwrap();
                    }
                    assert_eq!(len, est, "k={k} pair ({u},{v})");
                    assert_eq!(path.first(), Some(&u));
                    assert_eq!(path.last(), Some(&v));
                }
            }
        }
    }

    #[test]
    fn forced_first_level_is_honored() {
        let g = fix_p5();
        let o = tz_build_with_first_level(&g, 2, &[2], 0).unwrap();
        assert_eq!(o.levels()[1], vec![2]);
    }
}

//! Immutable weighted undirected graph with exact and truncated shortest-path
//! search, plus the brute-force all-pairs oracle used for verification.
//!
//! The graph is adjacency-indexed (CSR) and canonicalized at construction:
//! node ids live in `[0, n)`, weights are non-negative finite `f64`, parallel
//! edges collapse to the minimum weight and self-loops are rejected. All
//! search routines are pure reads over the immutable structure; scratch state
//! is caller-owned, so concurrent searches are safe.
//!
//! Distance comparisons use exact float equality throughout: equal distances
//! arise only as identical sums of identical weights, so no epsilon policy is
//! needed (or wanted — it would leak into ball membership).

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

pub type NodeId = u32;

/// Sentinel for "no node" in parent/hop arrays.
pub const INVALID_NODE: NodeId = NodeId::MAX;

/// Default cap on `n` for the all-pairs verification oracle.
pub const DEFAULT_VERIFICATION_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum GraphError {
    SelfLoop { node: NodeId },
    NodeOutOfRange { node: NodeId, n: usize },
    BadWeight { u: NodeId, v: NodeId, weight: f64 },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::SelfLoop { node } => write!(f, "self-loop at node {node}"),
            GraphError::NodeOutOfRange { node, n } => {
                write!(f, "node id {node} out of range [0, {n})")
            }
            GraphError::BadWeight { u, v, weight } => {
                write!(f, "edge ({u}, {v}) has invalid weight {weight}")
            }
        }
    }
}

impl core::error::Error for GraphError {}

/// Immutable weighted undirected graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(NodeId, NodeId, f64)>,
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Vec<f64>,
    connected: bool,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate undirected edges collapse
    /// to the minimum weight; self-loops, out-of-range ids and negative or
    /// non-finite weights are rejected.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId, f64)>,
    ) -> Result<Graph, GraphError> {
        let mut canon: Vec<(NodeId, NodeId, f64)> = Vec::new();
        for (u, v, w) in edges {
            if u == v {
                return Err(GraphError::SelfLoop { node: u });
            }
            if u as usize >= n {
                return Err(GraphError::NodeOutOfRange { node: u, n });
            }
            if v as usize >= n {
                return Err(GraphError::NodeOutOfRange { node: v, n });
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(GraphError::BadWeight { u, v, weight: w });
            }
            canon.push((u.min(v), u.max(v), w));
        }
        canon.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        canon.dedup_by(|next, kept| next.0 == kept.0 && next.1 == kept.1);

        let mut offsets = vec![0usize; n + 1];
        for &(u, v, _) in &canon {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let m2 = canon.len() * 2;
        let mut targets = vec![0 as NodeId; m2];
        let mut weights = vec![0.0f64; m2];
        let mut cursor = offsets.clone();
        // Scanning edges in (u, v) order keeps every adjacency slice sorted.
        for &(u, v, w) in &canon {
            let cu = cursor[u as usize];
            targets[cu] = v;
            weights[cu] = w;
            cursor[u as usize] += 1;
            let cv = cursor[v as usize];
            targets[cv] = u;
            weights[cv] = w;
            cursor[v as usize] += 1;
        }

        let mut g = Graph {
            n,
            edges: canon,
            offsets,
            targets,
            weights,
            connected: false,
        };
        g.connected = g.compute_connected();
        Ok(g)
    }

    fn compute_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0 as NodeId];
        seen[0] = true;
        let mut count = 1usize;
        while let Some(u) = stack.pop() {
            for (v, _) in self.neighbors(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list: `u < v`, sorted, unique.
    pub fn edges(&self) -> &[(NodeId, NodeId, f64)] {
        &self.edges
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v as NodeId)).max().unwrap_or(0)
    }

    /// Average degree `2m/n`.
    pub fn avg_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / self.n as f64
        }
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Neighbors of `v` with edge weights, ascending by node id.
    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let lo = self.offsets[v as usize];
        let hi = self.offsets[v as usize + 1];
        self.targets[lo..hi]
            .iter()
            .copied()
            .zip(self.weights[lo..hi].iter().copied())
    }

    /// Weight of the edge `(u, v)` if present.
    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        let lo = self.offsets[u as usize];
        let hi = self.offsets[u as usize + 1];
        let slice = &self.targets[lo..hi];
        slice.binary_search(&v).ok().map(|i| self.weights[lo + i])
    }
}

/// Extracts the largest connected component (ties broken toward the component
/// containing the smallest node id). Returns the induced graph with ids
/// compacted to `[0, n')` and the mapping from new id to original id.
pub fn largest_component(g: &Graph) -> (Graph, Vec<NodeId>) {
    let n = g.node_count();
    if n == 0 {
        return (g.clone(), Vec::new());
    }
    let mut comp = vec![usize::MAX; n];
    let mut sizes: Vec<usize> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut size = 0usize;
        let mut stack = vec![start as NodeId];
        comp[start] = id;
        while let Some(u) = stack.pop() {
            size += 1;
            for (v, _) in g.neighbors(u) {
                if comp[v as usize] == usize::MAX {
                    comp[v as usize] = id;
                    stack.push(v);
                }
            }
        }
        sizes.push(size);
    }
    let best = sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap();
    let old_ids: Vec<NodeId> = (0..n)
        .filter(|&v| comp[v] == best)
        .map(|v| v as NodeId)
        .collect();
    let mut new_id = vec![INVALID_NODE; n];
    for (i, &old) in old_ids.iter().enumerate() {
        new_id[old as usize] = i as NodeId;
    }
    let edges = g
        .edges()
        .iter()
        .filter(|(u, v, _)| comp[*u as usize] == best && comp[*v as usize] == best)
        .map(|&(u, v, w)| (new_id[u as usize], new_id[v as usize], w));
    let sub = Graph::from_edges(old_ids.len(), edges).expect("component edges are valid");
    (sub, old_ids)
}

/// Exact shortest distances and shortest-path tree from one source.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    pub source: NodeId,
    dist: Vec<f64>,
    parent: Vec<NodeId>,
}

impl DistanceTable {
    /// Reassembles a table from raw arrays (serialization support); `parent`
    /// uses [`INVALID_NODE`] for unreachable nodes.
    pub fn from_parts(source: NodeId, dist: Vec<f64>, parent: Vec<NodeId>) -> Self {
        assert_eq!(dist.len(), parent.len());
        DistanceTable { source, dist, parent }
    }

    pub fn dist(&self, v: NodeId) -> f64 {
        self.dist[v as usize]
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    /// Raw parent array; [`INVALID_NODE`] marks unreachable nodes.
    pub fn parents(&self) -> &[NodeId] {
        &self.parent
    }

    /// Predecessor of `v` on the shortest path from the source; the source's
    /// parent is itself. `None` for unreachable nodes.
    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        let p = self.parent[v as usize];
        (p != INVALID_NODE).then_some(p)
    }

    /// Path `source -> .. -> v`; empty if `v` is unreachable.
    pub fn path_from_source(&self, v: NodeId) -> Vec<NodeId> {
        if self.parent[v as usize] == INVALID_NODE {
            return Vec::new();
        }
        let mut path = vec![v];
        let mut cur = v;
        while cur != self.source {
            cur = self.parent[cur as usize];
            path.push(cur);
        }
        path.reverse();
        path
    }
}

#[derive(Debug, Clone, Copy)]
struct HeapItem {
    dist: f64,
    key: NodeId,
    node: NodeId,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    // Inverted: BinaryHeap is a max-heap and we pop (dist, key, node) ascending.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.key.cmp(&self.key))
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Exact single-source shortest paths. Unreachable nodes keep infinite
/// distance and no parent.
pub fn dijkstra(g: &Graph, source: NodeId) -> DistanceTable {
    let n = g.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![INVALID_NODE; n];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0.0;
    parent[source as usize] = source;
    heap.push(HeapItem { dist: 0.0, key: source, node: source });
    while let Some(HeapItem { dist: d, node: u, .. }) = heap.pop() {
        if d > dist[u as usize] {
            continue;
        }
        for (v, w) in g.neighbors(u) {
            let nd = d + w;
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
                parent[v as usize] = u;
                heap.push(HeapItem { dist: nd, key: v, node: v });
            }
        }
    }
    DistanceTable { source, dist, parent }
}

/// Distances to the nearest of several sources, with the witness (the source
/// attaining the minimum, ties broken toward the lowest witness id) and the
/// predecessor on the witness path.
#[derive(Debug, Clone)]
pub struct WitnessTable {
    pub dist: Vec<f64>,
    pub witness: Vec<NodeId>,
    pub parent: Vec<NodeId>,
}

/// Multi-source Dijkstra over the lexicographic key `(distance, witness id)`.
pub fn dijkstra_multi(g: &Graph, sources: &[NodeId]) -> WitnessTable {
    let n = g.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut witness = vec![INVALID_NODE; n];
    let mut parent = vec![INVALID_NODE; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        // Lowest-id source wins coincident starts.
        if dist[s as usize] > 0.0 || witness[s as usize] > s {
            dist[s as usize] = 0.0;
            witness[s as usize] = s;
            parent[s as usize] = s;
            heap.push(HeapItem { dist: 0.0, key: s, node: s });
        }
    }
    while let Some(HeapItem { dist: d, key: wit, node: u }) = heap.pop() {
        if d > dist[u as usize] || (d == dist[u as usize] && wit > witness[u as usize]) {
            continue;
        }
        for (v, w) in g.neighbors(u) {
            let nd = d + w;
            let better = nd < dist[v as usize]
                || (nd == dist[v as usize] && wit < witness[v as usize]);
            if better {
                dist[v as usize] = nd;
                witness[v as usize] = wit;
                parent[v as usize] = u;
                heap.push(HeapItem { dist: nd, key: wit, node: v });
            }
        }
    }
    WitnessTable { dist, witness, parent }
}

/// A node settled by a (possibly truncated) search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settled {
    pub node: NodeId,
    pub dist: f64,
    /// Second node on the shortest source path (the source maps to itself).
    pub first_hop: NodeId,
    /// Predecessor on the shortest source path (the source maps to itself).
    pub parent: NodeId,
}

/// Reusable state for incremental searches; clearing is O(1) via stamping.
#[derive(Debug, Default)]
pub struct SearchScratch {
    dist: Vec<f64>,
    first_hop: Vec<NodeId>,
    parent: Vec<NodeId>,
    seen: Vec<u32>,
    done: Vec<u32>,
    round: u32,
    heap: BinaryHeap<HeapItem>,
}

impl SearchScratch {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts a fresh search from `source`.
    pub fn begin(&mut self, g: &Graph, source: NodeId) {
        let n = g.node_count();
        if self.dist.len() < n {
            self.dist.resize(n, 0.0);
            self.first_hop.resize(n, INVALID_NODE);
            self.parent.resize(n, INVALID_NODE);
            self.seen.resize(n, 0);
            self.done.resize(n, 0);
        }
        if self.round == u32::MAX {
            self.seen.iter_mut().for_each(|s| *s = 0);
            self.done.iter_mut().for_each(|s| *s = 0);
            self.round = 0;
        }
        self.round += 1;
        self.heap.clear();
        let s = source as usize;
        self.dist[s] = 0.0;
        self.first_hop[s] = source;
        self.parent[s] = source;
        self.seen[s] = self.round;
        self.heap.push(HeapItem { dist: 0.0, key: source, node: source });
    }

    fn is_seen(&self, v: NodeId) -> bool {
        self.seen[v as usize] == self.round
    }

    pub fn is_settled(&self, v: NodeId) -> bool {
        self.done[v as usize] == self.round
    }

    pub fn settled_dist(&self, v: NodeId) -> Option<f64> {
        self.is_settled(v).then(|| self.dist[v as usize])
    }

    /// Predecessor of a settled node on its shortest source path.
    pub fn parent_of(&self, v: NodeId) -> Option<NodeId> {
        self.is_settled(v).then(|| self.parent[v as usize])
    }

    /// First hop of a settled node's shortest source path.
    pub fn first_hop_of(&self, v: NodeId) -> Option<NodeId> {
        self.is_settled(v).then(|| self.first_hop[v as usize])
    }

    /// Distance of the next node that would settle, without settling it.
    pub fn peek_dist(&mut self) -> Option<f64> {
        while let Some(top) = self.heap.peek() {
            if self.is_settled(top.node) {
                self.heap.pop();
            } else {
                return Some(top.dist);
            }
        }
        None
    }

    /// Settles the next node (nondecreasing distance, ties by node id) and
    /// relaxes its edges. Returns `None` when the reachable set is exhausted.
    pub fn settle_next(&mut self, g: &Graph) -> Option<Settled> {
        let item = loop {
            let top = self.heap.pop()?;
            if !self.is_settled(top.node) {
                break top;
            }
        };
        let u = item.node;
        self.done[u as usize] = self.round;
        let d = self.dist[u as usize];
        let hop = self.first_hop[u as usize];
        let par = self.parent[u as usize];
        let source = hop == u && par == u;
        for (v, w) in g.neighbors(u) {
            if self.is_settled(v) {
                continue;
            }
            let nd = d + w;
            if !self.is_seen(v) || nd < self.dist[v as usize] {
                self.seen[v as usize] = self.round;
                self.dist[v as usize] = nd;
                self.first_hop[v as usize] = if source { v } else { hop };
                self.parent[v as usize] = u;
                self.heap.push(HeapItem { dist: nd, key: v, node: v });
            }
        }
        Some(Settled { node: u, dist: d, first_hop: hop, parent: par })
    }
}

/// Stopping rule for [`truncated_dijkstra`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// Settle exactly the nodes at distance strictly below the radius.
    Radius(f64),
    /// Settle the `c` nearest nodes (ties broken by ascending node id).
    Count(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    RadiusReached,
    CountReached,
    Exhausted,
}

#[derive(Debug, Clone)]
pub struct TruncatedSearchResult {
    pub source: NodeId,
    /// Settled nodes in settle order (nondecreasing distance).
    pub settled: Vec<Settled>,
    pub reason: StopReason,
}

pub fn truncated_dijkstra(g: &Graph, source: NodeId, rule: StopRule) -> TruncatedSearchResult {
    truncated_dijkstra_with(g, source, rule, &mut SearchScratch::new())
}

pub fn truncated_dijkstra_with(
    g: &Graph,
    source: NodeId,
    rule: StopRule,
    scratch: &mut SearchScratch,
) -> TruncatedSearchResult {
    scratch.begin(g, source);
    let mut settled = Vec::new();
    let reason = loop {
        match rule {
            StopRule::Radius(r) => match scratch.peek_dist() {
                None => break StopReason::Exhausted,
                Some(d) if d >= r => break StopReason::RadiusReached,
                Some(_) => settled.push(scratch.settle_next(g).unwrap()),
            },
            StopRule::Count(c) => {
                if settled.len() == c {
                    break StopReason::CountReached;
                }
                match scratch.settle_next(g) {
                    None => break StopReason::Exhausted,
                    Some(s) => settled.push(s),
                }
            }
        }
    };
    TruncatedSearchResult { source, settled, reason }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    Disconnected,
    OverCap { n: usize, cap: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::Disconnected => write!(f, "graph is not connected"),
            OracleError::OverCap { n, cap } => {
                write!(f, "graph has {n} nodes, above the verification cap {cap}")
            }
        }
    }
}

impl core::error::Error for OracleError {}

/// Exact all-pairs distance matrix with per-source shortest-path trees.
/// Verification ground truth only; refuses graphs above the cap.
#[derive(Debug, Clone)]
pub struct AllPairs {
    n: usize,
    dist: Vec<f64>,
    parent: Vec<NodeId>,
}

impl AllPairs {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn dist(&self, u: NodeId, v: NodeId) -> f64 {
        self.dist[u as usize * self.n + v as usize]
    }

    /// Shortest path `u -> .. -> v` from u's tree.
    pub fn path(&self, u: NodeId, v: NodeId) -> Vec<NodeId> {
        let row = u as usize * self.n;
        let mut path = vec![v];
        let mut cur = v;
        while cur != u {
            cur = self.parent[row + cur as usize];
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// Weight of the heaviest edge on the tree shortest path between `u` and
    /// `v`; zero when `u == v`.
    pub fn max_edge_on_path(&self, g: &Graph, u: NodeId, v: NodeId) -> f64 {
        let row = u as usize * self.n;
        let mut heaviest = 0.0f64;
        let mut cur = v;
        while cur != u {
            let p = self.parent[row + cur as usize];
            let w = g.edge_weight(cur, p).expect("tree edge exists");
            heaviest = heaviest.max(w);
            cur = p;
        }
        heaviest
    }
}

/// Builds the exact all-pairs oracle by running one Dijkstra per node.
pub fn exact_oracle(g: &Graph, cap: usize) -> Result<AllPairs, OracleError> {
    let n = g.node_count();
    if !g.is_connected() {
        return Err(OracleError::Disconnected);
    }
    if n > cap {
        return Err(OracleError::OverCap { n, cap });
    }
    let mut dist = Vec::with_capacity(n * n);
    let mut parent = Vec::with_capacity(n * n);
    for u in 0..n {
        let table = dijkstra(g, u as NodeId);
        dist.extend_from_slice(&table.dist);
        parent.extend_from_slice(&table.parent);
    }
    Ok(AllPairs { n, dist, parent })
}

//! The stretch-(4k-1) distance oracle.
//!
//! Instead of full per-landmark distance rows, this oracle keeps a
//! Thorup-Zwick sub-oracle over the complete graph on the landmark set,
//! whose edge weights are the exact inter-landmark distances. The query is
//! identical to the stretch-2 query through the intersection steps; the
//! fallback answers `d(u, l(u)) + sub(l(u), l(v)) + d(l(v), v)`.
//!
//! Distance estimation never needs per-landmark trees, but path retrieval
//! does: each landmark keeps a leg table — its shortest-path tree restricted
//! to its own cell (the nodes it is nearest to) and to all landmarks — which
//! is enough to expand every route the sub-oracle can emit. Leg tables are
//! accounted separately from the oracle's audited size.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{dijkstra, Graph, NodeId, SearchScratch};
use crate::landmark::{
    las_vegas_build, nearest_landmarks, sample_landmarks, BuildError, HasStoredSize, LandmarkMode,
    LandmarkSet, NearestLandmark, SizeBound, SizeBreakdown, VicinityStore,
};
use crate::query::{intersect_front, Branch, FrontOutcome, QueryOptions, QueryResult, Tables};
use crate::rng::derive_seed;
use crate::stretch2::Variant;
use crate::tz::{tz_build, tz_query, TzOracle};

#[derive(Debug, Clone)]
pub struct MultConfig {
    pub sampling: LandmarkMode,
    pub k: u32,
    pub variant: Variant,
    pub seed: u64,
    pub size_bound: SizeBound,
    pub max_attempts: u32,
}

impl MultConfig {
    pub fn new(alpha: f64, k: u32, variant: Variant, seed: u64) -> Self {
        MultConfig {
            sampling: LandmarkMode::DegreeProportional { alpha, delta: None },
            k,
            variant,
            seed,
            size_bound: SizeBound::default(),
            max_attempts: 16,
        }
    }

    pub fn uniform(alpha: f64, k: u32, variant: Variant, seed: u64) -> Self {
        MultConfig {
            sampling: LandmarkMode::Uniform { alpha },
            ..Self::new(alpha, k, variant, seed)
        }
    }

    pub fn forced(landmarks: Vec<NodeId>, k: u32, variant: Variant, seed: u64) -> Self {
        MultConfig {
            sampling: LandmarkMode::Forced(landmarks),
            k,
            variant,
            seed,
            size_bound: SizeBound::Unbounded,
            max_attempts: 1,
        }
    }
}

/// Per-landmark shortest-path tree fragment: the landmark's cell plus all
/// landmarks, closed under parent chains.
#[derive(Debug, Clone)]
struct LegTable {
    entries: Vec<LegEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct LegEntry {
    node: NodeId,
    parent: NodeId,
}

impl LegTable {
    fn parent(&self, v: NodeId) -> NodeId {
        let i = self
            .entries
            .binary_search_by_key(&v, |e| e.node)
            .expect("node covered by leg table");
        self.entries[i].parent
    }

    /// Path `from -> .. -> landmark` along stored parents.
    fn path_to_landmark(&self, landmark: NodeId, from: NodeId) -> Vec<NodeId> {
        let mut path = vec![from];
        let mut cur = from;
        while cur != landmark {
            cur = self.parent(cur);
            path.push(cur);
        }
        path
    }

    fn len(&self) -> usize {
        self.entries.len()
    }
}

#[derive(Debug, Clone)]
pub struct MultOracle {
    graph: Arc<Graph>,
    landmarks: LandmarkSet,
    nearest: Vec<NearestLandmark>,
    sub: TzOracle,
    legs: Vec<LegTable>,
    stored: Option<VicinityStore>,
    k: u32,
    size: SizeBreakdown,
    attempts: u32,
}

fn mode_alpha(mode: &LandmarkMode) -> Option<f64> {
    match mode {
        LandmarkMode::Uniform { alpha }
        | LandmarkMode::DegreeProportional { alpha, .. }
        | LandmarkMode::PaperEvalUniform { alpha }
        | LandmarkMode::PaperEvalDegree { alpha } => Some(*alpha),
        LandmarkMode::Forced(_) => None,
    }
}

/// `2m + (n/alpha)^(1+1/k)`, plus `2m*alpha` when vicinities are stored.
fn size_formula(g: &Graph, alpha: f64, k: u32, variant: Variant) -> f64 {
    let n = g.node_count() as f64;
    let m2 = 2.0 * g.edge_count() as f64;
    let sub = libm::pow(n / alpha, 1.0 + 1.0 / k as f64);
    match variant {
        Variant::OnFly => m2 + sub,
        Variant::Stored => m2 * alpha + sub,
    }
}

pub fn build_mult(g: &Graph, cfg: &MultConfig) -> Result<MultOracle, BuildError> {
    if !g.is_connected() {
        return Err(BuildError::Disconnected);
    }
    if cfg.k < 1 {
        return Err(BuildError::BadParam("k must be at least 1"));
    }
    if let Some(alpha) = mode_alpha(&cfg.sampling) {
        if !(1.0 <= alpha && alpha <= g.node_count() as f64) {
            return Err(BuildError::BadParam("alpha must lie in [1, n]"));
        }
    }
    let bound = mode_alpha(&cfg.sampling)
        .and_then(|alpha| cfg.size_bound.resolve(size_formula(g, alpha, cfg.k, cfg.variant)));
    let graph = Arc::new(g.clone());
    let (mut oracle, attempts) = las_vegas_build(
        |seed| attempt(&graph, cfg, seed),
        cfg.seed,
        bound,
        cfg.max_attempts,
    )?;
    oracle.attempts = attempts;
    Ok(oracle)
}

/// One Dijkstra per landmark: the complete-graph edge weights and the
/// per-landmark leg tables (tree restricted to the landmark's cell plus all
/// landmarks, closed under parents) come out of the same sweep.
fn landmark_sweep(
    g: &Graph,
    landmarks: &LandmarkSet,
    nearest: &[NearestLandmark],
) -> (Vec<LegTable>, Vec<(NodeId, NodeId, f64)>) {
    let members = landmarks.members();
    let mut gprime_edges: Vec<(NodeId, NodeId, f64)> = Vec::new();
    let mut legs: Vec<LegTable> = Vec::with_capacity(members.len());
    for (i, &l) in members.iter().enumerate() {
        let row = dijkstra(g, l);
        for (j, &l2) in members.iter().enumerate().skip(i + 1) {
            gprime_edges.push((i as NodeId, j as NodeId, row.dist(l2)));
        }
        let mut targets: Vec<NodeId> = (0..g.node_count() as NodeId)
            .filter(|&v| nearest[v as usize].landmark == l)
            .collect();
        targets.extend_from_slice(members);
        let covered =
            |entries: &[LegEntry], v: NodeId| entries.binary_search_by_key(&v, |e| e.node).is_ok();
        let mut entries: Vec<LegEntry> = Vec::new();
        let mut staged: Vec<LegEntry> = Vec::new();
        for &t in &targets {
            let mut cur = t;
            while cur != l {
                if covered(&entries, cur) || staged.iter().any(|e| e.node == cur) {
                    break;
                }
                let p = row.parent(cur).expect("connected");
                staged.push(LegEntry { node: cur, parent: p });
                cur = p;
            }
            if staged.len() > 64 {
                entries.append(&mut staged);
                entries.sort_unstable_by_key(|e| e.node);
            }
        }
        entries.append(&mut staged);
        entries.push(LegEntry { node: l, parent: l });
        entries.sort_unstable_by_key(|e| e.node);
        entries.dedup_by_key(|e| e.node);
        legs.push(LegTable { entries });
    }
    (legs, gprime_edges)
}

fn attempt(graph: &Arc<Graph>, cfg: &MultConfig, seed: u64) -> Result<MultOracle, BuildError> {
    let g = graph.as_ref();
    let landmarks = sample_landmarks(g, &cfg.sampling, seed)?;
    let nearest = nearest_landmarks(g, &landmarks);
    let (legs, gprime_edges) = landmark_sweep(g, &landmarks, &nearest);
    let gprime = Graph::from_edges(landmarks.len(), gprime_edges).expect("valid landmark graph");
    let sub = tz_build(&gprime, cfg.k, derive_seed(seed, 1))?;

    let stored = match cfg.variant {
        Variant::Stored => Some(VicinityStore::compute(g, &landmarks)),
        Variant::OnFly => None,
    };

    let n = g.node_count() as u64;
    let mut size = SizeBreakdown {
        adjacency: 2 * g.edge_count() as u64,
        node_meta: n,
        tz_entries: sub.stored_entries(),
        leg_entries: legs.iter().map(|t| t.len() as u64).sum(),
        ..SizeBreakdown::default()
    };
    if let Some(store) = &stored {
        size.ball_entries = store.ball_entry_total();
        size.vicinity_entries = store.vicinity_entry_total();
        size.vicinity_support = store.support_total();
    }

    Ok(MultOracle {
        graph: graph.clone(),
        landmarks,
        nearest,
        sub,
        legs,
        stored,
        k: cfg.k,
        size,
        attempts: 0,
    })
}

impl HasStoredSize for MultOracle {
    fn stored_entries(&self) -> u64 {
        self.size.total()
    }
}

impl MultOracle {
    /// Reassembles an oracle from serialized parts. Nearest landmarks, leg
    /// tables and size accounting are recomputed deterministically; `k`
    /// comes from the embedded sub-oracle.
    pub fn from_parts(
        graph: Graph,
        landmarks: LandmarkSet,
        sub: TzOracle,
        stored: Option<VicinityStore>,
    ) -> Self {
        assert_eq!(sub.node_count(), landmarks.len());
        let nearest = nearest_landmarks(&graph, &landmarks);
        let (legs, _) = landmark_sweep(&graph, &landmarks, &nearest);
        let n = graph.node_count() as u64;
        let mut size = SizeBreakdown {
            adjacency: 2 * graph.edge_count() as u64,
            node_meta: n,
            tz_entries: sub.stored_entries(),
            leg_entries: legs.iter().map(|t| t.len() as u64).sum(),
            ..SizeBreakdown::default()
        };
        if let Some(store) = &stored {
            size.ball_entries = store.ball_entry_total();
            size.vicinity_entries = store.vicinity_entry_total();
            size.vicinity_support = store.support_total();
        }
        let k = sub.k();
        MultOracle {
            graph: Arc::new(graph),
            landmarks,
            nearest,
            sub,
            legs,
            stored,
            k,
            size,
            attempts: 0,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn landmarks(&self) -> &LandmarkSet {
        &self.landmarks
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn nearest(&self, v: NodeId) -> NearestLandmark {
        self.nearest[v as usize]
    }

    pub fn sub_oracle(&self) -> &TzOracle {
        &self.sub
    }

    pub fn size(&self) -> &SizeBreakdown {
        &self.size
    }

    pub fn build_attempts(&self) -> u32 {
        self.attempts
    }

    pub fn store(&self) -> Option<&VicinityStore> {
        self.stored.as_ref()
    }

    fn tables_for<'a>(&'a self, v: NodeId, scratch: &mut SearchScratch) -> Tables<'a> {
        match &self.stored {
            Some(store) => Tables::Borrowed(&store.balls[v as usize], &store.vicinities[v as usize]),
            None => {
                let (b, vic) =
                    crate::landmark::compute_ball_and_vicinity(&self.graph, v, &self.landmarks, scratch);
                Tables::Owned(b, vic)
            }
        }
    }

    fn landmark_index(&self, l: NodeId) -> NodeId {
        self.landmarks.index_of(l).expect("landmark member") as NodeId
    }

    /// Sub-oracle estimate of the distance between two landmarks.
    fn sub_distance(&self, la: NodeId, lb: NodeId) -> f64 {
        tz_query(&self.sub, self.landmark_index(la), self.landmark_index(lb)).estimate
    }

    pub fn query(&self, u: NodeId, v: NodeId) -> QueryResult {
        self.query_with(u, v, QueryOptions::default(), &mut SearchScratch::new())
    }

    pub fn query_with(
        &self,
        u: NodeId,
        v: NodeId,
        opts: QueryOptions,
        scratch: &mut SearchScratch,
    ) -> QueryResult {
        self.query_impl(u, v, opts, scratch, false)
    }

    pub fn query_optimized(&self, u: NodeId, v: NodeId) -> QueryResult {
        self.query_optimized_with(u, v, QueryOptions::default(), &mut SearchScratch::new())
    }

    /// Plain query plus the ball-member shortcut minimum
    /// `d(u,w) + d(w,l(w)) + sub(l(w), l(v)) + d(l(v), v)`.
    pub fn query_optimized_with(
        &self,
        u: NodeId,
        v: NodeId,
        opts: QueryOptions,
        scratch: &mut SearchScratch,
    ) -> QueryResult {
        self.query_impl(u, v, opts, scratch, true)
    }

    fn query_impl(
        &self,
        u: NodeId,
        v: NodeId,
        opts: QueryOptions,
        scratch: &mut SearchScratch,
        optimize: bool,
    ) -> QueryResult {
        if u == v {
            return QueryResult {
                estimate: 0.0,
                branch: Branch::DirectVicinity,
                via: None,
                probes: 0,
                path: None,
            };
        }
        let tu = self.tables_for(u, scratch);
        let tv = self.tables_for(v, scratch);
        let (front, mut probes) =
            intersect_front(u, v, tu.ball(), tu.vicinity(), tv.ball(), tv.vicinity(), opts);
        let nu = self.nearest[u as usize];
        let nv = self.nearest[v as usize];
        let mut result = match front {
            FrontOutcome::Exact { dist } => QueryResult {
                estimate: dist,
                branch: Branch::DirectVicinity,
                via: None,
                probes,
                path: None,
            },
            FrontOutcome::Met { meet, .. } => QueryResult {
                estimate: meet.dsum,
                branch: Branch::BallVicinity,
                via: Some(meet.node),
                probes,
                path: None,
            },
            FrontOutcome::Miss => QueryResult {
                estimate: nu.radius + self.sub_distance(nu.landmark, nv.landmark) + nv.radius,
                branch: Branch::TzFallback,
                via: Some(nu.landmark),
                probes,
                path: None,
            },
        };
        if optimize {
            let mut best: Option<(f64, NodeId)> = None;
            for e in tu.ball().entries() {
                probes += 1;
                let lw = self.nearest[e.node as usize];
                let s = e.dist + lw.radius + self.sub_distance(lw.landmark, nv.landmark) + nv.radius;
                let better = match best {
                    None => true,
                    Some((bs, bw)) => s < bs || (s == bs && e.node < bw),
                };
                if better {
                    best = Some((s, e.node));
                }
            }
            result.probes = probes;
            if let Some((s, w)) = best {
                if s < result.estimate {
                    result.estimate = s;
                    result.branch = Branch::OptimizedShortcut;
                    result.via = Some(w);
                }
            }
        }
        result
    }

    /// Expands the sub-oracle's route between two landmarks into graph hops.
    fn expand_sub_route(&self, la: NodeId, lb: NodeId) -> Vec<NodeId> {
        let a = self.landmark_index(la);
        let b = self.landmark_index(lb);
        if a == b {
            return vec![la];
        }
        // Re-run the witness climb to recover the route's middle landmark.
        let (mut x, mut y) = (a, b);
        let mut w = x;
        let mut i = 0u32;
        while self.sub.bunch_get(y, w).is_none() {
            i += 1;
            core::mem::swap(&mut x, &mut y);
            w = self.sub.witness(i, x).witness;
        }
        let members = self.landmarks.members();
        let (gx, gw, gy) = (members[x as usize], members[w as usize], members[y as usize]);
        // Each complete-graph edge expands through an endpoint's leg table.
        let mut path = vec![gx];
        if w != x {
            // x's table holds the tree path gw -> .. -> gx; reverse it.
            let mut leg = self.legs[x as usize].path_to_landmark(gx, gw);
            leg.reverse();
            path.extend(leg.into_iter().skip(1));
        }
        if w != y {
            // y's table holds gw -> .. -> gy directly.
            let leg = self.legs[y as usize].path_to_landmark(gy, gw);
            path.extend(leg.into_iter().skip(1));
        }
        if x != a {
            path.reverse();
        }
        path
    }

    /// Reconstructs the walk behind a query result; the fallback expands the
    /// sub-oracle's landmark route through the leg tables.
    pub fn retrieve_path(&self, qr: &QueryResult, u: NodeId, v: NodeId) -> Vec<NodeId> {
        let mut scratch = SearchScratch::new();
        if u == v {
            return vec![u];
        }
        match qr.branch {
            Branch::DirectVicinity => {
                let tu = self.tables_for(u, &mut scratch);
                if tu.vicinity().contains(v) {
                    tu.vicinity().path_from_owner(v)
                } else {
                    let tv = self.tables_for(v, &mut scratch);
                    let mut path = tv.vicinity().path_from_owner(u);
                    path.reverse();
                    path
                }
            }
            Branch::BallVicinity => {
                let w = qr.via.expect("meet node");
                let tu = self.tables_for(u, &mut scratch);
                let tv = self.tables_for(v, &mut scratch);
                if tu.ball().contains(w) && tv.vicinity().contains(w) {
                    let mut path = tu.ball().path_from_owner(w);
                    let mut tail = tv.vicinity().path_from_owner(w);
                    tail.reverse();
                    path.extend(tail.into_iter().skip(1));
                    path
                } else {
                    let mut path = tu.vicinity().path_from_owner(w);
                    let mut tail = tv.ball().path_from_owner(w);
                    tail.reverse();
                    path.extend(tail.into_iter().skip(1));
                    path
                }
            }
            Branch::TzFallback => {
                let nu = self.nearest[u as usize];
                let nv = self.nearest[v as usize];
                let mut path =
                    self.legs[self.landmark_index(nu.landmark) as usize].path_to_landmark(nu.landmark, u);
                path.extend(
                    self.expand_sub_route(nu.landmark, nv.landmark)
                        .into_iter()
                        .skip(1),
                );
                let mut leg = self.legs[self.landmark_index(nv.landmark) as usize]
                    .path_to_landmark(nv.landmark, v);
                leg.reverse();
                path.extend(leg.into_iter().skip(1));
                path
            }
            Branch::OptimizedShortcut => {
                let w = qr.via.expect("shortcut node");
                let tu = self.tables_for(u, &mut scratch);
                let lw = self.nearest[w as usize];
                let nv = self.nearest[v as usize];
                let mut path = tu.ball().path_from_owner(w);
                let leg =
                    self.legs[self.landmark_index(lw.landmark) as usize].path_to_landmark(lw.landmark, w);
                path.extend(leg.into_iter().skip(1));
                path.extend(
                    self.expand_sub_route(lw.landmark, nv.landmark)
                        .into_iter()
                        .skip(1),
                );
                let mut leg = self.legs[self.landmark_index(nv.landmark) as usize]
                    .path_to_landmark(nv.landmark, v);
                leg.reverse();
                path.extend(leg.into_iter().skip(1));
                path
            }
            Branch::LandmarkU | Branch::LandmarkV => {
                unreachable!("the stretch-(4k-1) oracle has no landmark rows")
            }
        }
    }
}

//! Landmark sampling, per-node ball and vicinity computation, the
//! intersection primitives behind all query algorithms, and the Las Vegas
//! size-bound retry loop shared by the oracle builders.
//!
//! For a landmark set `L`, a node's ball is everything strictly closer than
//! its nearest landmark, and its vicinity is the ball plus all neighbors of
//! ball members. Ball entries store exact distances with the first hop and
//! the predecessor; predecessors of ball members stay inside the ball, so
//! paths to ball members can be walked in constant time per hop. Vicinity
//! members' shortest paths may leave the vicinity, so each vicinity keeps a
//! small parent-chain support set covering the tree paths to its members.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{dijkstra_multi, Graph, NodeId, SearchScratch, Settled};
use crate::reduction::degree_proportional_probability;
use crate::rng::SplitMix64;

/// How the landmark set is drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum LandmarkMode {
    /// Each node independently with probability `1/alpha`.
    Uniform { alpha: f64 },
    /// Each node with probability `min(1, ceil(deg(v)/delta) / alpha)`, the
    /// sampling-side form of the degree reduction. `delta` defaults to the
    /// average degree when `None`.
    DegreeProportional { alpha: f64, delta: Option<f64> },
    /// Evaluation profile: `min(1, sqrt(log2 n) / alpha)`.
    PaperEvalUniform { alpha: f64 },
    /// Evaluation profile: `min(1, sqrt(log2 n) / alpha * deg(v) / log2(n)^2)`.
    PaperEvalDegree { alpha: f64 },
    /// Exactly these nodes.
    Forced(Vec<NodeId>),
}

impl LandmarkMode {
    /// Per-node sampling probability; `None` for forced mode.
    pub fn probability(&self, g: &Graph, v: NodeId) -> Option<f64> {
        let n = g.node_count() as f64;
        match self {
            LandmarkMode::Uniform { alpha } => Some((1.0 / alpha).min(1.0)),
            LandmarkMode::DegreeProportional { alpha, delta } => {
                let delta = delta.unwrap_or_else(|| g.avg_degree());
                Some(degree_proportional_probability(g, v, *alpha, delta))
            }
            LandmarkMode::PaperEvalUniform { alpha } => {
                Some((libm::sqrt(libm::log2(n)) / alpha).min(1.0))
            }
            LandmarkMode::PaperEvalDegree { alpha } => {
                let log2n = libm::log2(n);
                let p = libm::sqrt(log2n) / alpha * g.degree(v) as f64 / (log2n * log2n);
                Some(p.min(1.0))
            }
            LandmarkMode::Forced(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LandmarkError {
    EmptyForcedSet,
    NodeOutOfRange { node: NodeId, n: usize },
    /// Sampling kept drawing empty sets (all probabilities zero?).
    EmptyDraws { attempts: u32 },
}

impl fmt::Display for LandmarkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LandmarkError::EmptyForcedSet => write!(f, "forced landmark set is empty"),
            LandmarkError::NodeOutOfRange { node, n } => {
                write!(f, "landmark id {node} out of range [0, {n})")
            }
            LandmarkError::EmptyDraws { attempts } => {
                write!(f, "landmark sampling drew an empty set {attempts} times")
            }
        }
    }
}

impl core::error::Error for LandmarkError {}

/// A sampled (or forced) landmark set.
#[derive(Debug, Clone)]
pub struct LandmarkSet {
    members: Vec<NodeId>,
    flags: Vec<bool>,
    pub mode: LandmarkMode,
    pub seed: u64,
}

impl LandmarkSet {
    /// Reassembles a set from its parts (serialization support).
    pub fn from_parts(
        n: usize,
        members: Vec<NodeId>,
        mode: LandmarkMode,
        seed: u64,
    ) -> Result<Self, LandmarkError> {
        if members.is_empty() {
            return Err(LandmarkError::EmptyForcedSet);
        }
        let mut members = members;
        members.sort_unstable();
        members.dedup();
        let mut flags = vec![false; n];
        for &v in &members {
            if v as usize >= n {
                return Err(LandmarkError::NodeOutOfRange { node: v, n });
            }
            flags[v as usize] = true;
        }
        Ok(LandmarkSet { members, flags, mode, seed })
    }

    /// Members in ascending id order.
    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.flags[v as usize]
    }

    /// Dense index of a member (its rank in the sorted member list).
    pub fn index_of(&self, v: NodeId) -> Option<usize> {
        self.members.binary_search(&v).ok()
    }
}

/// Draws a landmark set: one Bernoulli trial per node in id order, one
/// `next_f64` per trial. Empty draws are redone with the seed incremented.
pub fn sample_landmarks(
    g: &Graph,
    mode: &LandmarkMode,
    seed: u64,
) -> Result<LandmarkSet, LandmarkError> {
    let n = g.node_count();
    if let LandmarkMode::Forced(nodes) = mode {
        if nodes.is_empty() {
            return Err(LandmarkError::EmptyForcedSet);
        }
        let mut members = nodes.clone();
        members.sort_unstable();
        members.dedup();
        let mut flags = vec![false; n];
        for &v in &members {
            if v as usize >= n {
                return Err(LandmarkError::NodeOutOfRange { node: v, n });
            }
            flags[v as usize] = true;
        }
        return Ok(LandmarkSet { members, flags, mode: mode.clone(), seed });
    }

    const MAX_DRAWS: u32 = 4096;
    for attempt in 0..MAX_DRAWS {
        let s = seed.wrapping_add(attempt as u64);
        let mut rng = SplitMix64::new(s);
        let mut members = Vec::new();
        let mut flags = vec![false; n];
        for v in 0..n as NodeId {
            let p = mode.probability(g, v).expect("sampling mode");
            if rng.bernoulli(p) {
                members.push(v);
                flags[v as usize] = true;
            }
        }
        if !members.is_empty() {
            return Ok(LandmarkSet { members, flags, mode: mode.clone(), seed: s });
        }
    }
    Err(LandmarkError::EmptyDraws { attempts: MAX_DRAWS })
}

/// Nearest landmark and its distance, per node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearestLandmark {
    pub landmark: NodeId,
    pub radius: f64,
}

/// One multi-source sweep; ties go to the lowest landmark id, identical to
/// per-node nearest-landmark searches.
pub fn nearest_landmarks(g: &Graph, landmarks: &LandmarkSet) -> Vec<NearestLandmark> {
    let wt = dijkstra_multi(g, landmarks.members());
    (0..g.node_count())
        .map(|v| NearestLandmark { landmark: wt.witness[v], radius: wt.dist[v] })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallEntry {
    pub node: NodeId,
    pub dist: f64,
    pub first_hop: NodeId,
    pub parent: NodeId,
}

/// The ball of a node: everything strictly closer than the nearest landmark.
#[derive(Debug, Clone)]
pub struct BallInfo {
    pub node: NodeId,
    pub landmark: NodeId,
    pub radius: f64,
    entries: Vec<BallEntry>,
}

impl BallInfo {
    /// Reassembles ball info (serialization support); entries must be sorted
    /// by node id.
    pub fn from_parts(node: NodeId, landmark: NodeId, radius: f64, entries: Vec<BallEntry>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].node < w[1].node));
        BallInfo { node, landmark, radius, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BallEntry] {
        &self.entries
    }

    pub fn get(&self, v: NodeId) -> Option<&BallEntry> {
        self.entries
            .binary_search_by_key(&v, |e| e.node)
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.get(v).is_some()
    }

    /// Walks predecessors from `target` back to the owner; every hop stays
    /// inside the ball. Returns the path owner -> .. -> target.
    pub fn path_from_owner(&self, target: NodeId) -> Vec<NodeId> {
        let mut path = vec![target];
        let mut cur = target;
        while cur != self.node {
            cur = self.get(cur).expect("ball parents stay in the ball").parent;
            path.push(cur);
        }
        path.reverse();
        path
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VicinityEntry {
    pub node: NodeId,
    pub dist: f64,
    pub first_hop: NodeId,
}

/// The vicinity of a node: its ball plus all neighbors of ball members, with
/// exact distances (the search continues until every member is settled).
#[derive(Debug, Clone)]
pub struct VicinityInfo {
    pub node: NodeId,
    entries: Vec<VicinityEntry>,
    /// Parent chains covering the shortest-path tree paths to all members;
    /// may contain interior nodes that are not members themselves.
    support: Vec<(NodeId, NodeId)>,
}

impl VicinityInfo {
    /// Reassembles vicinity info (serialization support); both lists must be
    /// sorted by node id.
    pub fn from_parts(
        node: NodeId,
        entries: Vec<VicinityEntry>,
        support: Vec<(NodeId, NodeId)>,
    ) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].node < w[1].node));
        debug_assert!(support.windows(2).all(|w| w[0].0 < w[1].0));
        VicinityInfo { node, entries, support }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[VicinityEntry] {
        &self.entries
    }

    pub fn support(&self) -> &[(NodeId, NodeId)] {
        &self.support
    }

    pub fn get(&self, v: NodeId) -> Option<&VicinityEntry> {
        self.entries
            .binary_search_by_key(&v, |e| e.node)
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.get(v).is_some()
    }

    fn support_parent(&self, v: NodeId) -> NodeId {
        let i = self
            .support
            .binary_search_by_key(&v, |e| e.0)
            .expect("node on a supported path");
        self.support[i].1
    }

    /// Exact shortest path owner -> .. -> target for any member.
    pub fn path_from_owner(&self, target: NodeId) -> Vec<NodeId> {
        let mut path = vec![target];
        let mut cur = target;
        while cur != self.node {
            cur = self.support_parent(cur);
            path.push(cur);
        }
        path.reverse();
        path
    }
}

/// Runs a truncated search from `v` until the first landmark settles; that
/// landmark (ties resolved by the settle order: distance, then id) defines
/// the radius, and the ball is every node settled strictly inside it.
///
/// Panics if no landmark is reachable from `v`; oracle constructors reject
/// disconnected graphs before getting here.
pub fn compute_ball(
    g: &Graph,
    v: NodeId,
    landmarks: &LandmarkSet,
    scratch: &mut SearchScratch,
) -> BallInfo {
    scratch.begin(g, v);
    let mut inside: Vec<Settled> = Vec::new();
    let (landmark, radius) = loop {
        let s = scratch
            .settle_next(g)
            .expect("some landmark is reachable from every node");
        if landmarks.contains(s.node) {
            break (s.node, s.dist);
        }
        inside.push(s);
    };
    let mut entries: Vec<BallEntry> = inside
        .into_iter()
        .filter(|s| s.dist < radius)
        .map(|s| BallEntry { node: s.node, dist: s.dist, first_hop: s.first_hop, parent: s.parent })
        .collect();
    entries.sort_unstable_by_key(|e| e.node);
    BallInfo { node: v, landmark, radius, entries }
}

/// Computes the vicinity of `ball.node` by re-running the search until every
/// member of ball-union-neighbors is settled. The ball's own membership is
/// taken as given.
pub fn compute_vicinity(g: &Graph, ball: &BallInfo, scratch: &mut SearchScratch) -> VicinityInfo {
    if ball.is_empty() {
        // Landmarks have empty balls, and N(empty) is empty.
        return VicinityInfo { node: ball.node, entries: Vec::new(), support: Vec::new() };
    }
    let mut targets: Vec<NodeId> = Vec::new();
    for e in ball.entries() {
        targets.push(e.node);
        for (w, _) in g.neighbors(e.node) {
            targets.push(w);
        }
    }
    targets.sort_unstable();
    targets.dedup();

    scratch.begin(g, ball.node);
    let mut remaining = targets.len();
    let mut entries: Vec<VicinityEntry> = Vec::with_capacity(targets.len());
    while remaining > 0 {
        let s = scratch
            .settle_next(g)
            .expect("vicinity members are reachable");
        if targets.binary_search(&s.node).is_ok() {
            entries.push(VicinityEntry { node: s.node, dist: s.dist, first_hop: s.first_hop });
            remaining -= 1;
        }
    }
    entries.sort_unstable_by_key(|e| e.node);

    // Parent chains from each member back to the owner, deduplicated.
    let mut support: Vec<(NodeId, NodeId)> = Vec::new();
    for &t in &targets {
        let mut cur = t;
        while cur != ball.node {
            if support.iter().any(|&(n, _)| n == cur) {
                break;
            }
            let p = scratch.parent_of(cur).expect("member path is settled");
            support.push((cur, p));
            cur = p;
        }
    }
    support.sort_unstable_by_key(|e| e.0);
    VicinityInfo { node: ball.node, entries, support }
}

/// Ball and vicinity in one pass.
pub fn compute_ball_and_vicinity(
    g: &Graph,
    v: NodeId,
    landmarks: &LandmarkSet,
    scratch: &mut SearchScratch,
) -> (BallInfo, VicinityInfo) {
    let ball = compute_ball(g, v, landmarks, scratch);
    let vicinity = compute_vicinity(g, &ball, scratch);
    (ball, vicinity)
}

/// The best meeting node of an intersection probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Meet {
    pub node: NodeId,
    /// `d(u, w) + d(w, v)` through the meeting node.
    pub dsum: f64,
}

fn best_meet(cur: Option<Meet>, cand: Meet) -> Option<Meet> {
    match cur {
        None => Some(cand),
        Some(best) => {
            if cand.dsum < best.dsum || (cand.dsum == best.dsum && cand.node < best.node) {
                Some(cand)
            } else {
                Some(best)
            }
        }
    }
}

/// Probes every ball member of `u` for membership in the vicinity of `v`,
/// returning the meeting node minimizing `d(u,w) + d(w,v)` (ties to the
/// lowest id) and the number of membership probes spent.
pub fn ball_vicinity_intersect(bu: &BallInfo, gv: &VicinityInfo) -> (Option<Meet>, u32) {
    let mut best = None;
    let mut probes = 0;
    for e in bu.entries() {
        probes += 1;
        if let Some(hit) = gv.get(e.node) {
            best = best_meet(best, Meet { node: e.node, dsum: e.dist + hit.dist });
        }
    }
    (best, probes)
}

/// Ball-ball variant: probes members of `bu` against the ball of `v`.
pub fn ball_ball_intersect(bu: &BallInfo, bv: &BallInfo) -> (Option<Meet>, u32) {
    let mut best = None;
    let mut probes = 0;
    for e in bu.entries() {
        probes += 1;
        if let Some(hit) = bv.get(e.node) {
            best = best_meet(best, Meet { node: e.node, dsum: e.dist + hit.dist });
        }
    }
    (best, probes)
}

/// Evaluation-only variant probing the full vicinity of `u` against the
/// vicinity of `v`; not covered by the intersection lemmas.
pub fn vicinity_vicinity_intersect(gu: &VicinityInfo, gv: &VicinityInfo) -> (Option<Meet>, u32) {
    let mut best = None;
    let mut probes = 0;
    for e in gu.entries() {
        probes += 1;
        if let Some(hit) = gv.get(e.node) {
            best = best_meet(best, Meet { node: e.node, dsum: e.dist + hit.dist });
        }
    }
    (best, probes)
}

/// Anything with a countable stored-entry footprint.
pub trait HasStoredSize {
    fn stored_entries(&self) -> u64;
}

/// Precomputed balls and vicinities for every node (the stored variant of
/// the search-based oracles).
#[derive(Debug, Clone)]
pub struct VicinityStore {
    pub balls: Vec<BallInfo>,
    pub vicinities: Vec<VicinityInfo>,
}

impl VicinityStore {
    pub fn compute(g: &Graph, landmarks: &LandmarkSet) -> VicinityStore {
        let mut scratch = SearchScratch::new();
        let mut balls = Vec::with_capacity(g.node_count());
        let mut vicinities = Vec::with_capacity(g.node_count());
        for v in 0..g.node_count() as NodeId {
            let (b, vic) = compute_ball_and_vicinity(g, v, landmarks, &mut scratch);
            balls.push(b);
            vicinities.push(vic);
        }
        VicinityStore { balls, vicinities }
    }

    pub fn ball_entry_total(&self) -> u64 {
        self.balls.iter().map(|b| b.len() as u64).sum()
    }

    pub fn vicinity_entry_total(&self) -> u64 {
        self.vicinities.iter().map(|v| v.len() as u64).sum()
    }

    pub fn support_total(&self) -> u64 {
        self.vicinities.iter().map(|v| v.support().len() as u64).sum()
    }
}

/// Stored-entry accounting, by component. `total` is the oracle's
/// `size_entries` figure; the stretch-(4k-1) oracle's landmark leg tables
/// are path-retrieval assists that distance estimation never consults, so
/// they are reported separately and excluded from the audited total.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SizeBreakdown {
    /// Retained adjacency (both directions of every edge).
    pub adjacency: u64,
    /// Full distance rows kept per landmark.
    pub landmark_rows: u64,
    /// Per-node nearest landmark and radius.
    pub node_meta: u64,
    pub ball_entries: u64,
    pub vicinity_entries: u64,
    /// Parent-chain support stored alongside vicinities.
    pub vicinity_support: u64,
    /// Embedded sub-oracle entries.
    pub tz_entries: u64,
    /// Landmark leg tables (path retrieval only; not in `total`).
    pub leg_entries: u64,
}

impl SizeBreakdown {
    pub fn total(&self) -> u64 {
        self.adjacency
            + self.landmark_rows
            + self.node_meta
            + self.ball_entries
            + self.vicinity_entries
            + self.vicinity_support
            + self.tz_entries
    }
}

/// Stored-entry budget for a Las Vegas build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SizeBound {
    /// The module's expected-size formula times this factor.
    Auto { factor: f64 },
    Entries(u64),
    Unbounded,
}

impl Default for SizeBound {
    fn default() -> Self {
        SizeBound::Auto { factor: 4.0 }
    }
}

impl SizeBound {
    /// Resolves against an expected-size formula value.
    pub fn resolve(&self, formula: f64) -> Option<u64> {
        match self {
            SizeBound::Auto { factor } => Some(libm::ceil(factor * formula) as u64),
            SizeBound::Entries(e) => Some(*e),
            SizeBound::Unbounded => None,
        }
    }
}

/// Construction failure shared by the oracle builders.
#[derive(Debug, Clone)]
pub enum BuildError {
    Disconnected,
    BadParam(&'static str),
    Landmark(LandmarkError),
    Tz(crate::tz::TzError),
    /// Las Vegas loop exhausted: every attempt exceeded the size bound.
    SizeBound { bound: u64, attempts: u32, sizes: Vec<u64> },
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::Disconnected => write!(f, "graph is not connected"),
            BuildError::BadParam(msg) => write!(f, "invalid parameter: {msg}"),
            BuildError::Landmark(e) => write!(f, "landmark sampling failed: {e}"),
            BuildError::Tz(e) => write!(f, "sub-oracle build failed: {e}"),
            BuildError::SizeBound { bound, attempts, sizes } => write!(
                f,
                "no build within size bound {bound} after {attempts} attempts (sizes {sizes:?})"
            ),
        }
    }
}

impl core::error::Error for BuildError {}

impl From<LandmarkError> for BuildError {
    fn from(e: LandmarkError) -> Self {
        BuildError::Landmark(e)
    }
}

impl From<crate::tz::TzError> for BuildError {
    fn from(e: crate::tz::TzError) -> Self {
        BuildError::Tz(e)
    }
}

impl From<LasVegasError<BuildError>> for BuildError {
    fn from(e: LasVegasError<BuildError>) -> Self {
        match e {
            LasVegasError::Build(inner) => inner,
            LasVegasError::Exhausted { bound, attempts, sizes } => {
                BuildError::SizeBound { bound, attempts, sizes }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum LasVegasError<E> {
    /// Every attempt exceeded the bound; measured sizes attached.
    Exhausted { bound: u64, attempts: u32, sizes: Vec<u64> },
    Build(E),
}

impl<E: fmt::Display> fmt::Display for LasVegasError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LasVegasError::Exhausted { bound, attempts, sizes } => write!(
                f,
                "no build within size bound {bound} after {attempts} attempts (sizes {sizes:?})"
            ),
            LasVegasError::Build(e) => write!(f, "build failed: {e}"),
        }
    }
}

impl<E: fmt::Debug + fmt::Display> core::error::Error for LasVegasError<E> {}

/// Rebuilds with seeds `seed, seed + 1, ..` until the stored-entry count
/// fits the bound. Returns the accepted build and the number of attempts.
pub fn las_vegas_build<T, E, F>(
    mut attempt: F,
    seed: u64,
    bound: Option<u64>,
    max_attempts: u32,
) -> Result<(T, u32), LasVegasError<E>>
where
    T: HasStoredSize,
    F: FnMut(u64) -> Result<T, E>,
{
    let mut sizes = Vec::new();
    for i in 0..max_attempts.max(1) {
        let built = attempt(seed.wrapping_add(i as u64)).map_err(LasVegasError::Build)?;
        let size = built.stored_entries();
        match bound {
            Some(b) if size > b => sizes.push(size),
            _ => return Ok((built, i + 1)),
        }
    }
    Err(LasVegasError::Exhausted {
        bound: bound.unwrap_or(u64::MAX),
        attempts: max_attempts.max(1),
        sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fix_p5, fix_w5, L1, L2, M, U, V};
    use crate::graph::Graph;

    fn forced(g: &Graph, nodes: &[NodeId]) -> LandmarkSet {
        sample_landmarks(g, &LandmarkMode::Forced(nodes.to_vec()), 0).unwrap()
    }

    #[test]
    fn forced_mode_and_uniform_alpha_one() {
        let g = fix_p5();
        let l = forced(&g, &[2]);
        assert_eq!(l.members(), &[2]);

        let all = sample_landmarks(&g, &LandmarkMode::Uniform { alpha: 1.0 }, 9).unwrap();
        assert_eq!(all.len(), 5);
    }

    #[test]
    fn forced_empty_is_rejected() {
        let g = fix_p5();
        assert!(matches!(
            sample_landmarks(&g, &LandmarkMode::Forced(Vec::new()), 0),
            Err(LandmarkError::EmptyForcedSet)
        ));
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let g = crate::generators::gen_gnm(128, 384, 5).unwrap();
        let mode = LandmarkMode::Uniform { alpha: 8.0 };
        let a = sample_landmarks(&g, &mode, 3).unwrap();
        let b = sample_landmarks(&g, &mode, 3).unwrap();
        assert_eq!(a.members(), b.members());
    }

    #[test]
    fn ball_on_path_graph() {
        let g = fix_p5();
        let l = forced(&g, &[2]);
        let mut scratch = SearchScratch::new();
        let b = compute_ball(&g, 0, &l, &mut scratch);
        assert_eq!((b.landmark, b.radius), (2, 2.0));
        let members: Vec<_> = b.entries().iter().map(|e| (e.node, e.dist)).collect();
        assert_eq!(members, vec![(0, 0.0), (1, 1.0)]);

        // The landmark itself: zero radius, empty ball, empty vicinity.
        let bl = compute_ball(&g, 2, &l, &mut scratch);
        assert_eq!((bl.landmark, bl.radius), (2, 0.0));
        assert!(bl.is_empty());
        let vl = compute_vicinity(&g, &bl, &mut scratch);
        assert!(vl.is_empty());
    }

    #[test]
    fn ball_w5() {
        let g = fix_w5();
        let l = forced(&g, &[L1, L2]);
        let mut scratch = SearchScratch::new();
        let b = compute_ball(&g, U, &l, &mut scratch);
        assert_eq!((b.landmark, b.radius), (L1, 1.0));
        assert_eq!(b.len(), 1);
        assert!(b.contains(U));
    }

    #[test]
    fn vicinity_on_fixtures() {
        let g = fix_p5();
        let l = forced(&g, &[2]);
        let mut scratch = SearchScratch::new();
        let (_, vic) = compute_ball_and_vicinity(&g, 0, &l, &mut scratch);
        let got: Vec<_> = vic.entries().iter().map(|e| (e.node, e.dist)).collect();
        assert_eq!(got, vec![(0, 0.0), (1, 1.0), (2, 2.0)]);

        let g = fix_w5();
        let l = forced(&g, &[L1, L2]);
        let (_, vic) = compute_ball_and_vicinity(&g, V, &l, &mut scratch);
        let got: Vec<_> = vic.entries().iter().map(|e| (e.node, e.dist)).collect();
        assert_eq!(got, vec![(M, 1.0), (V, 0.0), (L2, 1.0)]);
    }

    #[test]
    fn vicinity_key_set_matches_definition() {
        let g = crate::generators::gen_connected(|s| crate::generators::gen_gnm(96, 288, s), 1, 64)
            .unwrap()
            .0;
        let l = sample_landmarks(&g, &LandmarkMode::Uniform { alpha: 6.0 }, 2).unwrap();
        let mut scratch = SearchScratch::new();
        for v in 0..g.node_count() as NodeId {
            let (ball, vic) = compute_ball_and_vicinity(&g, v, &l, &mut scratch);
            let mut expect: Vec<NodeId> = ball.entries().iter().map(|e| e.node).collect();
            for e in ball.entries() {
                expect.extend(g.neighbors(e.node).map(|(w, _)| w));
            }
            expect.sort_unstable();
            expect.dedup();
            let got: Vec<NodeId> = vic.entries().iter().map(|e| e.node).collect();
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn intersections_on_fixtures() {
        let g = fix_p5();
        let l = forced(&g, &[2]);
        let mut scratch = SearchScratch::new();
        let (b0, _) = compute_ball_and_vicinity(&g, 0, &l, &mut scratch);
        let (b1, g1) = compute_ball_and_vicinity(&g, 1, &l, &mut scratch);
        let (b4, g4) = compute_ball_and_vicinity(&g, 4, &l, &mut scratch);

        // B(v0) = {v0, v1}, Gamma(v4) = {v2, v3, v4}: disjoint.
        let (none, probes) = ball_vicinity_intersect(&b0, &g4);
        assert_eq!(none, None);
        assert!(probes <= b0.len() as u32);

        // Gamma(v1) = {v0, v1, v2}; both v0 (0+1) and v1 (1+0) sum to 1, and
        // the lowest id wins the tie.
        let (hit, _) = ball_vicinity_intersect(&b0, &g1);
        assert_eq!(hit, Some(Meet { node: 0, dsum: 1.0 }));

        // B(v1) = {v1}.
        let (hit, _) = ball_ball_intersect(&b0, &b1);
        assert_eq!(hit, Some(Meet { node: 1, dsum: 1.0 }));
        let (none, _) = ball_ball_intersect(&b0, &b4);
        assert_eq!(none, None);

        // Same node both sides: meet at the node itself with sum 0.
        let (hit, _) = ball_ball_intersect(&b0, &b0);
        assert_eq!(hit, Some(Meet { node: 0, dsum: 0.0 }));

        // Empty ball never meets anything.
        let bl = compute_ball(&g, 2, &l, &mut scratch);
        let (none, probes) = ball_vicinity_intersect(&bl, &g1);
        assert_eq!((none, probes), (None, 0));
    }

    #[test]
    fn ball_paths_walk_inside_the_ball() {
        let g = fix_p5();
        let l = forced(&g, &[4]);
        let mut scratch = SearchScratch::new();
        let b = compute_ball(&g, 0, &l, &mut scratch);
        assert_eq!(b.path_from_owner(3), vec![0, 1, 2, 3]);
        let (_, vic) = compute_ball_and_vicinity(&g, 0, &l, &mut scratch);
        assert_eq!(vic.path_from_owner(4), vec![0, 1, 2, 3, 4]);
    }

    struct Sized(u64);
    impl HasStoredSize for Sized {
        fn stored_entries(&self) -> u64 {
            self.0
        }
    }

    #[test]
    fn las_vegas_accepts_and_exhausts() {
        let ok = las_vegas_build::<_, (), _>(|s| Ok(Sized(s)), 10, None, 4).unwrap();
        assert_eq!(ok.1, 1);

        let err = las_vegas_build::<_, (), _>(|s| Ok(Sized(s)), 10, Some(5), 3);
        match err {
            Err(LasVegasError::Exhausted { attempts, sizes, .. }) => {
                assert_eq!(attempts, 3);
                assert_eq!(sizes, vec![10, 11, 12]);
            }
            _ => panic!("expected exhaustion"),
        }

        let later = las_vegas_build::<_, (), _>(|s| Ok(Sized(20 - s)), 10, Some(9), 3).unwrap();
        assert_eq!(later.1, 2);
        assert_eq!(later.0.stored_entries(), 9);
    }
}

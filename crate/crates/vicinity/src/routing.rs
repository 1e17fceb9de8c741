//! Static simulator of the compact routing scheme derived from the stretch-2
//! oracle.
//!
//! Deployment distributes the oracle state uniformly: every router stores its
//! ball and vicinity (with first hops), its nearest landmark, and one
//! distance-plus-next-hop entry toward every landmark. No router holds a
//! full distance row; landmark legs are walked through the per-router
//! next-hop entries, with reverse legs materialized by the simulator the way
//! a connection setup would.
//!
//! A flow starts on the landmark route through the source's landmark (exact
//! if the destination already sits in the source's vicinity), which is within
//! stretch 3. The handshake then ships the source's ball id list to the
//! destination (4 bytes per id), the destination runs the intersection check
//! and replies with the best meeting node or "empty", and the flow switches
//! to the resulting route whenever it is no longer than the initial one.
//! A completed handshake leaves worst-case stretch 2.
//!
//! Probing and shortcutting then queries vicinity members (farthest-first or
//! closest-first) for routes through their landmarks, keeping the running
//! minimum; with the full vicinity budget the flow ends exactly at the
//! optimized query's estimate.
//!
//! Everything is static and post-convergence: no dynamics, no loss, byte and
//! packet counts only.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{dijkstra, Graph, NodeId, SearchScratch};
use crate::landmark::{ball_vicinity_intersect, BallInfo, BuildError, VicinityInfo};
use crate::query::QueryOptions;
use crate::stretch2::{build_stretch2, Stretch2Config, Stretch2Oracle, Variant};

/// Byte accounting knobs; the defaults follow common IPv4 arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoutingConfig {
    pub mtu_bytes: u64,
    pub id_bytes: u64,
}

impl Default for RoutingConfig {
    fn default() -> Self {
        RoutingConfig { mtu_bytes: 1500, id_bytes: 4 }
    }
}

/// Deployed network: the stored-variant oracle partitioned across routers.
#[derive(Debug, Clone)]
pub struct Network {
    oracle: Stretch2Oracle,
    cfg: RoutingConfig,
    entry_counts: Vec<u64>,
}

/// One router's table, as distributed by [`deploy`].
#[derive(Debug, Clone)]
pub struct RouterState<'a> {
    pub node: NodeId,
    pub landmark: NodeId,
    pub radius: f64,
    /// Distance and next hop toward every landmark.
    pub landmark_entries: Vec<LandmarkHop>,
    pub ball: &'a BallInfo,
    pub vicinity: &'a VicinityInfo,
    pub entry_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandmarkHop {
    pub landmark: NodeId,
    pub dist: f64,
    pub next_hop: NodeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeOrder {
    /// Probe vicinity members by descending distance (boundary first).
    FarthestFirst,
    /// Probe by ascending distance (neighbors first).
    ClosestFirst,
}

impl ProbeOrder {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProbeOrder::FarthestFirst => "farthest_first",
            ProbeOrder::ClosestFirst => "closest_first",
        }
    }
}

/// Per-flow record of the handshake and any probing.
#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub src: NodeId,
    pub dst: NodeId,
    pub d_exact: f64,
    pub initial_path: Vec<NodeId>,
    pub initial_len: f64,
    pub handshake_packets: u32,
    pub handshake_bytes: u64,
    pub final_path: Vec<NodeId>,
    pub final_len: f64,
    pub final_stretch: f64,
    pub probes_sent: u32,
    pub probe_order: Option<ProbeOrder>,
}

/// Builds the stretch-2 oracle state (stored variant) and accounts it onto
/// routers.
pub fn deploy(g: &Graph, alpha: f64, seed: u64) -> Result<Network, BuildError> {
    deploy_with(
        g,
        &Stretch2Config::new(alpha, Variant::Stored, seed),
        RoutingConfig::default(),
    )
}

/// Deployment with explicit oracle and byte-accounting configuration. The
/// variant is forced to `Stored`: routers hold their vicinities.
pub fn deploy_with(
    g: &Graph,
    cfg: &Stretch2Config,
    routing: RoutingConfig,
) -> Result<Network, BuildError> {
    let mut cfg = cfg.clone();
    cfg.variant = Variant::Stored;
    let oracle = build_stretch2(g, &cfg)?;
    let store = oracle.store().expect("stored variant");
    let landmarks = oracle.landmarks().len() as u64;
    let entry_counts: Vec<u64> = (0..g.node_count())
        .map(|v| {
            landmarks + store.balls[v].len() as u64 + store.vicinities[v].len() as u64 + 1
        })
        .collect();
    Ok(Network { oracle, cfg: routing, entry_counts })
}

impl Network {
    pub fn graph(&self) -> &Graph {
        self.oracle.graph()
    }

    pub fn oracle(&self) -> &Stretch2Oracle {
        &self.oracle
    }

    pub fn config(&self) -> RoutingConfig {
        self.cfg
    }

    pub fn router(&self, v: NodeId) -> RouterState<'_> {
        let store = self.oracle.store().expect("stored variant");
        let nearest = self.oracle.nearest(v);
        let landmark_entries = self
            .oracle
            .landmarks()
            .members()
            .iter()
            .map(|&l| {
                let row = self.oracle.row(l);
                LandmarkHop {
                    landmark: l,
                    dist: row.dist(v),
                    next_hop: row.parent(v).expect("connected"),
                }
            })
            .collect();
        RouterState {
            node: v,
            landmark: nearest.landmark,
            radius: nearest.radius,
            landmark_entries,
            ball: &store.balls[v as usize],
            vicinity: &store.vicinities[v as usize],
            entry_count: self.entry_counts[v as usize],
        }
    }

    pub fn entry_counts(&self) -> &[u64] {
        &self.entry_counts
    }

    pub fn max_entry_count(&self) -> u64 {
        self.entry_counts.iter().copied().max().unwrap_or(0)
    }

    pub fn mean_entry_count(&self) -> f64 {
        if self.entry_counts.is_empty() {
            0.0
        } else {
            self.entry_counts.iter().sum::<u64>() as f64 / self.entry_counts.len() as f64
        }
    }

    /// Route src -> l(src) -> dst through the landmark's shortest-path tree.
    fn landmark_route(&self, l: NodeId, src: NodeId, dst: NodeId) -> Vec<NodeId> {
        let row = self.oracle.row(l);
        let mut path = row.path_from_source(src);
        path.reverse();
        path.extend(row.path_from_source(dst).into_iter().skip(1));
        path
    }

    /// Runs the two-packet handshake for one flow. The final route follows
    /// the destination-side intersection check; the source keeps the initial
    /// route when it is no longer.
    pub fn handshake(&self, src: NodeId, dst: NodeId) -> FlowTrace {
        let store = self.oracle.store().expect("stored variant");
        let d_exact = dijkstra(self.graph(), src).dist(dst);
        let stretch = |len: f64| if d_exact > 0.0 { len / d_exact } else { 1.0 };

        if src == dst {
            return FlowTrace {
                src,
                dst,
                d_exact,
                initial_path: vec![src],
                initial_len: 0.0,
                handshake_packets: 0,
                handshake_bytes: 0,
                final_path: vec![src],
                final_len: 0.0,
                final_stretch: 1.0,
                probes_sent: 0,
                probe_order: None,
            };
        }

        let exact_flow = |path: Vec<NodeId>, len: f64| FlowTrace {
            src,
            dst,
            d_exact,
            initial_path: path.clone(),
            initial_len: len,
            handshake_packets: 0,
            handshake_bytes: 0,
            final_path: path,
            final_len: len,
            final_stretch: stretch(len),
            probes_sent: 0,
            probe_order: None,
        };

        // Destination already known locally: no handshake needed.
        let gu = &store.vicinities[src as usize];
        if let Some(e) = gu.get(dst) {
            return exact_flow(gu.path_from_owner(dst), e.dist);
        }
        // A landmark source routes on its own tree, exactly.
        if self.oracle.landmarks().contains(src) {
            let row = self.oracle.row(src);
            return exact_flow(row.path_from_source(dst), row.dist(dst));
        }

        let nu = self.oracle.nearest(src);
        let nv = self.oracle.nearest(dst);
        let initial_len = nu.radius + self.oracle.row(nu.landmark).dist(dst);
        let initial_path = self.landmark_route(nu.landmark, src, dst);

        let bu = &store.balls[src as usize];
        let bytes = self.cfg.id_bytes * bu.len() as u64;
        let forward_packets = 1 + bytes.saturating_sub(1) / self.cfg.mtu_bytes;
        let packets = forward_packets as u32 + 1; // plus the reply

        // Destination-side intersection check, exactly as the query listing.
        let gv = &store.vicinities[dst as usize];
        let (candidate_len, candidate_path) = if let Some(e) = gv.get(src) {
            let mut path = gv.path_from_owner(src);
            path.reverse();
            (e.dist, path)
        } else if let (Some(meet), _) = ball_vicinity_intersect(bu, gv) {
            let mut path = bu.path_from_owner(meet.node);
            let mut tail = gv.path_from_owner(meet.node);
            tail.reverse();
            path.extend(tail.into_iter().skip(1));
            (meet.dsum, path)
        } else if nu.radius <= nv.radius {
            (initial_len, initial_path.clone())
        } else {
            let len = nv.radius + self.oracle.row(nv.landmark).dist(src);
            (len, self.landmark_route(nv.landmark, src, dst))
        };

        let (final_len, final_path) = if candidate_len <= initial_len {
            (candidate_len, candidate_path)
        } else {
            (initial_len, initial_path.clone())
        };

        FlowTrace {
            src,
            dst,
            d_exact,
            initial_path,
            initial_len,
            handshake_packets: packets,
            handshake_bytes: bytes,
            final_stretch: stretch(final_len),
            final_path,
            final_len,
            probes_sent: 0,
            probe_order: None,
        }
    }

    /// Probes up to `budget` vicinity members of the source in the given
    /// order, switching to any shorter route through a member's landmark.
    /// The stretch is non-increasing in the budget; with the full vicinity
    /// probed the flow matches the optimized query estimate.
    pub fn probe_and_shortcut(&self, flow: &FlowTrace, order: ProbeOrder, budget: usize) -> FlowTrace {
        let store = self.oracle.store().expect("stored variant");
        let mut flow = flow.clone();
        flow.probe_order = Some(order);
        let gu = &store.vicinities[flow.src as usize];
        let mut candidates: Vec<(NodeId, f64)> =
            gu.entries().iter().map(|e| (e.node, e.dist)).collect();
        match order {
            ProbeOrder::FarthestFirst => {
                candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)))
            }
            ProbeOrder::ClosestFirst => {
                candidates.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            }
        }
        let budget = budget.min(candidates.len());
        for &(w, dist_w) in candidates.iter().take(budget) {
            flow.probes_sent += 1;
            let lw = self.oracle.nearest(w);
            let row = self.oracle.row(lw.landmark);
            let len = dist_w + lw.radius + row.dist(flow.dst);
            if len < flow.final_len {
                let mut path = gu.path_from_owner(w);
                let mut leg = row.path_from_source(w);
                leg.reverse();
                path.extend(leg.into_iter().skip(1));
                path.extend(row.path_from_source(flow.dst).into_iter().skip(1));
                flow.final_len = len;
                flow.final_path = path;
                flow.final_stretch = if flow.d_exact > 0.0 { len / flow.d_exact } else { 1.0 };
            }
        }
        flow
    }

    /// Strict-listing optimized query value; the full-budget probe target.
    pub fn query_optimized_strict(&self, src: NodeId, dst: NodeId) -> f64 {
        let opts = QueryOptions { strict_paper: true, ..QueryOptions::default() };
        self.oracle
            .query_optimized_with(src, dst, opts, &mut SearchScratch::new())
            .estimate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fix_p5, fix_w5, L1, L2, M, U, V};

    fn deploy_forced(g: &Graph, landmarks: Vec<NodeId>) -> Network {
        deploy_with(
            g,
            &Stretch2Config::forced(landmarks, Variant::Stored, 0),
            RoutingConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn p5_state_is_distributed() {
        let net = deploy_forced(&fix_p5(), vec![2]);
        // Every router holds one entry toward the single landmark; together
        // they carry its distance row.
        for v in 0..5u32 {
            let r = net.router(v);
            assert_eq!(r.landmark_entries.len(), 1);
            assert_eq!(r.landmark_entries[0].dist, net.oracle().row(2).dist(v));
        }
        // The landmark router itself keeps no ball or vicinity.
        let r2 = net.router(2);
        assert_eq!(r2.ball.len() + r2.vicinity.len(), 0);
        assert_eq!(r2.radius, 0.0);
    }

    #[test]
    fn entry_conservation() {
        let g = crate::generators::gen_connected(|s| crate::generators::gen_gnm(96, 288, s), 3, 64)
            .unwrap()
            .0;
        let net = deploy(&g, 4.0, 1).unwrap();
        let size = net.oracle().size();
        let total: u64 = net.entry_counts().iter().sum();
        assert_eq!(
            total,
            size.landmark_rows + size.ball_entries + size.vicinity_entries + size.node_meta
        );
    }

    #[test]
    fn single_edge_deployment_is_tiny() {
        let g = Graph::from_edges(2, [(0, 1, 1.0)]).unwrap();
        let net = deploy(&g, 1.0, 0).unwrap();
        assert!(net.max_entry_count() <= 8);
    }

    #[test]
    fn w5_handshake_reaches_stretch_two() {
        let net = deploy_forced(&fix_w5(), vec![L1, L2]);
        let flow = net.handshake(U, V);
        assert_eq!(flow.initial_len, 4.0);
        assert_eq!(flow.initial_path, vec![U, L1, U, M, V]);
        assert_eq!(flow.final_len, 4.0);
        assert_eq!(flow.final_stretch, 2.0);
        assert_eq!(flow.handshake_packets, 2);
        assert_eq!(flow.handshake_bytes, 4);
    }

    #[test]
    fn p5_vicinity_destination_resolves_immediately() {
        let net = deploy_forced(&fix_p5(), vec![2]);
        let flow = net.handshake(0, 2);
        assert_eq!(flow.final_path, vec![0, 1, 2]);
        assert_eq!(flow.handshake_packets, 0);
        assert_eq!(flow.final_stretch, 1.0);
    }

    #[test]
    fn packet_arithmetic() {
        // 165 ids at 4 bytes each: 660 bytes, one packet each way.
        let bytes = 165u64 * 4;
        assert_eq!(bytes, 660);
        let cfg = RoutingConfig::default();
        let fwd = 1 + bytes.saturating_sub(1) / cfg.mtu_bytes;
        assert_eq!(fwd, 1);
        // Just over one MTU takes two.
        let fwd = 1 + (1501u64).saturating_sub(1) / cfg.mtu_bytes;
        assert_eq!(fwd, 2);
    }

    #[test]
    fn probe_budget_zero_is_identity() {
        let net = deploy_forced(&fix_w5(), vec![L1, L2]);
        let flow = net.handshake(U, V);
        let probed = net.probe_and_shortcut(&flow, ProbeOrder::FarthestFirst, 0);
        assert_eq!(probed.final_len, flow.final_len);
        assert_eq!(probed.probes_sent, 0);
    }

    #[test]
    fn full_budget_matches_optimized_query() {
        let g = crate::generators::gen_connected(|s| crate::generators::gen_gnm(96, 288, s), 5, 64)
            .unwrap()
            .0;
        let net = deploy(&g, 6.0, 2).unwrap();
        let store = net.oracle().store().unwrap();
        for src in 0..24u32 {
            for dst in 0..96u32 {
                let flow = net.handshake(src, dst);
                let full = store.vicinities[src as usize].len();
                let probed = net.probe_and_shortcut(&flow, ProbeOrder::FarthestFirst, full + 10);
                assert_eq!(probed.probes_sent as usize, full.min(full + 10));
                assert_eq!(
                    probed.final_len,
                    net.query_optimized_strict(src, dst),
                    "pair ({src},{dst})"
                );
            }
        }
    }

    #[test]
    fn stretch_is_monotone_in_budget_and_final_paths_weigh_right() {
        let g = crate::generators::gen_connected(|s| crate::generators::gen_gnm(64, 192, s), 9, 64)
            .unwrap()
            .0;
        let net = deploy(&g, 4.0, 3).unwrap();
        for src in 0..8u32 {
            for dst in 48..64u32 {
                let flow = net.handshake(src, dst);
                assert!(flow.final_len <= flow.initial_len);
                assert!(flow.final_stretch <= 2.0 + 1e-12);
                let mut prev = f64::INFINITY;
                for budget in [0usize, 1, 2, 4, 8, 64] {
                    let probed = net.probe_and_shortcut(&flow, ProbeOrder::ClosestFirst, budget);
                    assert!(probed.final_len <= prev);
                    prev = probed.final_len;
                    let mut len = 0.0;
                    for hop in probed.final_path.windows(2) {
                        len += g.edge_weight(hop[0], hop[1]).unwrap();
                    }
                    assert_eq!(len, probed.final_len);
                }
            }
        }
    }
}

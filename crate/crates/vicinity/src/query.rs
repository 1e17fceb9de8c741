//! Query result types shared by the oracle family, and the intersection
//! front-end common to the stretch-2 and stretch-(4k-1) query algorithms.

use alloc::vec::Vec;

use crate::graph::NodeId;
use crate::landmark::{ball_vicinity_intersect, vicinity_vicinity_intersect, BallInfo, Meet, VicinityInfo};

/// Which step of the query algorithm produced the estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Membership pre-check hit (vicinity membership, or ball membership for
    /// the additive oracles); the estimate is an exact stored distance.
    DirectVicinity,
    /// Intersection hit; the estimate is the best meeting-node sum.
    BallVicinity,
    /// Fallback through the source-side landmark.
    LandmarkU,
    /// Fallback through the destination-side landmark.
    LandmarkV,
    /// A probing shortcut through a vicinity or ball member won.
    OptimizedShortcut,
    /// Fallback through the landmark pair and the embedded sub-oracle.
    TzFallback,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::DirectVicinity => "direct_vicinity",
            Branch::BallVicinity => "ball_vicinity",
            Branch::LandmarkU => "landmark_u",
            Branch::LandmarkV => "landmark_v",
            Branch::OptimizedShortcut => "optimized_shortcut",
            Branch::TzFallback => "tz_fallback",
        }
    }
}

/// An approximate distance answer.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub estimate: f64,
    pub branch: Branch,
    /// Meeting node or landmark the estimate routed through, if any.
    pub via: Option<NodeId>,
    /// Membership probes spent answering.
    pub probes: u32,
    pub path: Option<Vec<NodeId>>,
}

/// Query-time switches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryOptions {
    /// Disables the symmetric second intersection check, conforming exactly
    /// to the published listing.
    pub strict_paper: bool,
    /// Evaluation-only mode: intersect the two vicinities instead of ball
    /// against vicinity. Excluded from the stretch-bound guarantees.
    pub vicinity_vicinity: bool,
}

/// Endpoint tables, either borrowed from a stored-variant oracle or computed
/// on the fly for this query.
pub(crate) enum Tables<'a> {
    Borrowed(&'a BallInfo, &'a VicinityInfo),
    Owned(BallInfo, VicinityInfo),
}

impl Tables<'_> {
    pub(crate) fn ball(&self) -> &BallInfo {
        match self {
            Tables::Borrowed(b, _) => b,
            Tables::Owned(b, _) => b,
        }
    }

    pub(crate) fn vicinity(&self) -> &VicinityInfo {
        match self {
            Tables::Borrowed(_, v) => v,
            Tables::Owned(_, v) => v,
        }
    }
}

/// Outcome of the shared front half (membership checks plus intersection).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum FrontOutcome {
    /// Exact stored distance via a membership hit.
    Exact { dist: f64 },
    /// Intersection meet; `reversed` marks a hit from the symmetric check
    /// (legs swap for path assembly).
    Met { meet: Meet, reversed: bool },
    Miss,
}

/// Runs membership checks and the intersection step over one pair's tables.
pub(crate) fn intersect_front(
    u: NodeId,
    v: NodeId,
    bu: &BallInfo,
    gu: &VicinityInfo,
    bv: &BallInfo,
    gv: &VicinityInfo,
    opts: QueryOptions,
) -> (FrontOutcome, u32) {
    let mut probes = 1;
    if let Some(e) = gu.get(v) {
        return (FrontOutcome::Exact { dist: e.dist }, probes);
    }
    probes += 1;
    if let Some(e) = gv.get(u) {
        return (FrontOutcome::Exact { dist: e.dist }, probes);
    }
    if opts.vicinity_vicinity {
        let (meet, spent) = vicinity_vicinity_intersect(gu, gv);
        probes += spent;
        if let Some(meet) = meet {
            return (FrontOutcome::Met { meet, reversed: false }, probes);
        }
        return (FrontOutcome::Miss, probes);
    }
    let (meet, spent) = ball_vicinity_intersect(bu, gv);
    probes += spent;
    if let Some(meet) = meet {
        return (FrontOutcome::Met { meet, reversed: false }, probes);
    }
    if !opts.strict_paper {
        let (meet, spent) = ball_vicinity_intersect(bv, gu);
        probes += spent;
        if let Some(meet) = meet {
            return (FrontOutcome::Met { meet, reversed: true }, probes);
        }
    }
    (FrontOutcome::Miss, probes)
}

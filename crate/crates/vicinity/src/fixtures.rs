//! Hand-checkable fixture graphs shared by unit tests.

use crate::graph::{Graph, NodeId};

/// Unit-weight path `0 - 1 - 2 - 3 - 4`; tests force the landmark set `{2}`.
pub fn fix_p5() -> Graph {
    Graph::from_edges(5, (0..4).map(|i| (i, i + 1, 1.0))).unwrap()
}

pub const U: NodeId = 0;
pub const L1: NodeId = 1;
pub const M: NodeId = 2;
pub const V: NodeId = 3;
pub const L2: NodeId = 4;

/// Five nodes `{u, l1, m, v, l2}` with edges u-l1, u-m, m-v, v-l2, all unit
/// weight; tests force the landmark set `{l1, l2}`. Realizes the worst-case
/// stretch of the landmark fallback: d(u, v) = 2 but the route via l1 is 4.
pub fn fix_w5() -> Graph {
    Graph::from_edges(
        5,
        [(U, L1, 1.0), (U, M, 1.0), (M, V, 1.0), (V, L2, 1.0)],
    )
    .unwrap()
}

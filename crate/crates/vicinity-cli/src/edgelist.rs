//! Plain-text edge-list format.
//!
//! UTF-8, LF line endings. The first data line is `n m`; each of the
//! following `m` data lines is `u v w` with the weight optional (default 1).
//! `#` starts a comment line. Duplicate undirected edges collapse to the
//! minimum weight when the graph is built; self-loops, out-of-range ids and
//! negative weights are rejected with the offending line number.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;
use vicinity::graph::{Graph, GraphError, NodeId};
use vicinity::reduction::ReducedGraph;

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: {source}")]
    BadEdge { line: usize, source: GraphError },
    #[error("expected {expected} edge lines, found {found} (line {line})")]
    EdgeCountMismatch { expected: usize, found: usize, line: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parses the edge-list document into a graph.
pub fn parse_edge_list(text: &str) -> Result<Graph, EdgeListError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(NodeId, NodeId, f64)> = Vec::new();
    let mut last_line = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let data = raw.split('#').next().unwrap_or("").trim();
        if data.is_empty() {
            continue;
        }
        let fields: Vec<&str> = data.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 2 {
                    return Err(EdgeListError::Malformed {
                        line,
                        msg: format!("expected header 'n m', got {data:?}"),
                    });
                }
                let n = parse_num::<usize>(fields[0], line, "node count")?;
                let m = parse_num::<usize>(fields[1], line, "edge count")?;
                header = Some((n, m));
            }
            Some((_, m)) => {
                if edges.len() == m {
                    return Err(EdgeListError::EdgeCountMismatch {
                        expected: m,
                        found: m + 1,
                        line,
                    });
                }
                if fields.len() != 2 && fields.len() != 3 {
                    return Err(EdgeListError::Malformed {
                        line,
                        msg: format!("expected 'u v [w]', got {data:?}"),
                    });
                }
                let u = parse_num::<NodeId>(fields[0], line, "node id")?;
                let v = parse_num::<NodeId>(fields[1], line, "node id")?;
                let w = if fields.len() == 3 {
                    parse_num::<f64>(fields[2], line, "weight")?
                } else {
                    1.0
                };
                // Validate eagerly so errors carry the line number.
                let (n, _) = header.unwrap();
                if u == v {
                    return Err(EdgeListError::BadEdge { line, source: GraphError::SelfLoop { node: u } });
                }
                if u as usize >= n || v as usize >= n {
                    let node = if u as usize >= n { u } else { v };
                    return Err(EdgeListError::BadEdge {
                        line,
                        source: GraphError::NodeOutOfRange { node, n },
                    });
                }
                if !(w.is_finite() && w >= 0.0) {
                    return Err(EdgeListError::BadEdge {
                        line,
                        source: GraphError::BadWeight { u, v, weight: w },
                    });
                }
                edges.push((u, v, w));
            }
        }
    }
    let Some((n, m)) = header else {
        return Err(EdgeListError::Malformed { line: last_line.max(1), msg: "missing header".into() });
    };
    if edges.len() != m {
        return Err(EdgeListError::EdgeCountMismatch { expected: m, found: edges.len(), line: last_line });
    }
    Graph::from_edges(n, edges).map_err(|source| EdgeListError::BadEdge { line: last_line, source })
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T, EdgeListError> {
    s.parse().map_err(|_| EdgeListError::Malformed { line, msg: format!("bad {what} {s:?}") })
}

/// Formats a graph back into the edge-list document (canonical edge order).
pub fn format_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.node_count(), g.edge_count());
    for &(u, v, w) in g.edges() {
        let _ = writeln!(out, "{u} {v} {w}");
    }
    out
}

pub fn load_graph(path: &Path) -> Result<Graph, EdgeListError> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

pub fn save_graph(path: &Path, g: &Graph) -> Result<(), EdgeListError> {
    Ok(std::fs::write(path, format_edge_list(g))?)
}

/// Forced-landmark file: one node id per line, `#` comments.
pub fn parse_landmark_file(text: &str) -> Result<Vec<NodeId>, EdgeListError> {
    let mut ids = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let data = raw.split('#').next().unwrap_or("").trim();
        if data.is_empty() {
            continue;
        }
        ids.push(parse_num::<NodeId>(data, idx + 1, "landmark id")?);
    }
    Ok(ids)
}

pub fn load_landmark_file(path: &Path) -> Result<Vec<NodeId>, EdgeListError> {
    parse_landmark_file(&std::fs::read_to_string(path)?)
}

/// Debug dump of the per-node landmark state:
/// `v,landmark,radius,ball_size,vicinity_size`.
pub fn ball_dump_csv(oracle: &vicinity::stretch2::Stretch2Oracle) -> String {
    let mut out = String::from("v,landmark,radius,ball_size,vicinity_size\n");
    for v in 0..oracle.graph().node_count() as NodeId {
        let near = oracle.nearest(v);
        let (b, g) = match oracle.store() {
            Some(store) => (store.balls[v as usize].len(), store.vicinities[v as usize].len()),
            None => (0, 0),
        };
        let _ = writeln!(out, "{v},{},{},{b},{g}", near.landmark, near.radius);
    }
    out
}

/// Sidecar mapping for a reduced graph: one line per original node,
/// `orig copy0 copy1 ..`.
pub fn format_copies(rg: &ReducedGraph) -> String {
    let mut out = String::new();
    for v in 0..rg.original_count() as NodeId {
        let _ = write!(out, "{v}");
        for &c in rg.copies(v) {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
    }
    out
}
